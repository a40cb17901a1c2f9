#pragma once

#include <string_view>

namespace cvqkd {

/// Trusted-station and channel parameters, all variances in shot-noise units.
struct ProtocolParams {
  double V = 1.0;    ///< source variance, V = 1 + modulation variance
  double dV = 0.0;   ///< preparation noise
  double T = 1.0;    ///< purifying attenuation at the sender, (0, 1]
  double chi = 0.0;  ///< trusted detection noise
  double eta = 1.0;  ///< channel transmittivity
  double eps = 0.0;  ///< untrusted channel excess noise

  /// Throws DomainError when a field is out of range. T = 0 and eta = 1 are
  /// accepted as limits because several rates are continuous there.
  void validate() const;
};

enum class Attack { individual, collective };

std::string_view to_string(Attack a);

/// Lower bound on the secret key rate, reverse reconciliation, bits per symbol.
struct KeyRateResult {
  double i_ab = 0.0;      ///< Alice-Bob mutual information
  double eve_info = 0.0;  ///< I_BE (individual) or Holevo chi_BE (collective)
  double rate = 0.0;      ///< beta * i_ab - eve_info
  double beta = 1.0;      ///< reconciliation efficiency applied to i_ab
  Attack attack = Attack::individual;
  ProtocolParams params;
};

}  // namespace cvqkd
