#include "cvqkd/protocol.hpp"

#include "cvqkd/errors.hpp"

#include <string>

namespace cvqkd {

void ProtocolParams::validate() const {
  auto fail = [](const std::string& what, double v) {
    throw DomainError(what + " (got " + std::to_string(v) + ")");
  };
  if (!(V >= 1.0)) fail("source variance V must be >= 1", V);
  if (!(dV >= 0.0)) fail("preparation noise dV must be >= 0", dV);
  if (!(T >= 0.0 && T <= 1.0)) fail("attenuation T must lie in [0, 1]", T);
  if (!(chi >= 0.0)) fail("detection noise chi must be >= 0", chi);
  if (!(eta > 0.0 && eta <= 1.0)) fail("transmittivity eta must lie in (0, 1]", eta);
  if (!(eps >= 0.0)) fail("excess noise eps must be >= 0", eps);
}

std::string_view to_string(Attack a) {
  return a == Attack::individual ? "individual" : "collective";
}

}  // namespace cvqkd
