#include "cvqkd/analytic.hpp"

#include "cvqkd/errors.hpp"
#include "cvqkd/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cvqkd::analytic {
namespace {

double half_log2(double x) { return 0.5 * std::log2(x); }

KeyRateResult make_result(const ProtocolParams& p, double v_b, double v_b_given_a,
                          double v_b_given_e, double rate) {
  KeyRateResult r;
  r.attack = Attack::individual;
  r.params = p;
  r.i_ab = half_log2(v_b / v_b_given_a);
  r.eve_info = half_log2(v_b / v_b_given_e);
  r.rate = rate;
  return r;
}

void require_channel(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw DomainError("channel transmittivity must lie in (0, 1), got " +
                      std::to_string(eta));
  }
}

}  // namespace

CloneParams CloneParams::from_channel(double eta, double eps) {
  if (eps == 0.0) return {1.0};
  require_channel(eta);
  if (!(eps >= 0.0)) throw DomainError("excess noise must be >= 0");
  return {1.0 + eta * eps / (1.0 - eta)};
}

KeyRateResult individual_rate_detection(const ProtocolParams& p) {
  p.validate();
  if (p.eps != 0.0) throw DomainError("detection-noise rate requires eps = 0");
  const double x = p.T * (p.V + p.dV - 1.0);
  const double v_b_given_e = (1.0 + x) / (1.0 + x * (1.0 - p.eta)) + p.chi;
  const double v_b_given_a = 1.0 + p.T * p.eta * p.dV + p.chi;
  const double v_b = p.eta * (1.0 + x) + 1.0 - p.eta + p.chi;
  const double rate = half_log2(v_b_given_e) - half_log2(v_b_given_a);
  return make_result(p, v_b, v_b_given_a, v_b_given_e, rate);
}

KeyRateResult individual_rate_channel(const ProtocolParams& p) {
  p.validate();
  if (p.chi != 0.0) throw DomainError("channel-noise rate requires chi = 0");
  const double v_b0 = p.T * (p.V + p.dV) + 1.0 - p.T;
  const double v_b_given_e = 1.0 / (p.eta * (1.0 / v_b0 - 1.0 + p.eps) + 1.0);
  const double v_b_given_a = 1.0 + p.T * p.eta * p.dV + p.eps * p.eta;
  const double v_b = p.eta * v_b0 + 1.0 - p.eta + p.eta * p.eps;
  const double rate = half_log2(v_b_given_e) - half_log2(v_b_given_a);
  return make_result(p, v_b, v_b_given_a, v_b_given_e, rate);
}

KeyRateResult individual_rate(const ProtocolParams& p) {
  if (p.eps == 0.0) return individual_rate_detection(p);
  if (p.chi == 0.0) return individual_rate_channel(p);
  throw DomainError("closed-form individual rate needs chi = 0 or eps = 0");
}

KeyRateResult individual_rate_cloner(const ProtocolParams& p) {
  using namespace gaussian;
  p.validate();
  require_channel(p.eta);
  const Mode a{0}, b{1}, c{2}, e1{3};  // E2 is mode 4
  const double n = CloneParams::from_channel(p.eta, p.eps).N;

  auto state = compose({epr_source(p.V), CovarianceMatrix::vacuum(), epr_source(n)});
  state = add_phase_insensitive_noise(state, b, p.dV);
  state = beam_splitter(state, b, c, p.T);
  state = beam_splitter(state, b, e1, p.eta);
  state = add_phase_insensitive_noise(state, b, p.chi);

  const double v_b = static_cast<double>(state.variance(b, Quadrature::x));
  // Removing E1 (index 3) leaves E2 at index 3.
  const auto after_e1 = homodyne_condition(state, e1, Quadrature::x);
  const auto after_e = homodyne_condition(after_e1, Mode{3}, Quadrature::x);
  const double v_b_given_e = static_cast<double>(after_e.variance(b, Quadrature::x));
  // Removing A shifts B to index 0.
  const auto after_a = heterodyne_condition(state, a);
  const double v_b_given_a = static_cast<double>(after_a.variance(Mode{0}, Quadrature::x));

  KeyRateResult r = make_result(p, v_b, v_b_given_a, v_b_given_e, 0.0);
  r.rate = r.i_ab - r.eve_info;
  return r;
}

double dv_threshold_individual(double V, double eta) {
  if (!(V >= 1.0)) throw DomainError("source variance must be >= 1");
  require_channel(eta);
  if (V == 1.0) return 0.0;
  // Positive root of dV^2 + (V - 1) dV - (V - 1) / (1 - eta) = 0.
  const double a = V - 1.0;
  const double c = a / (1.0 - eta);
  return 2.0 * c / (std::sqrt(a * a + 4.0 * c) + a);
}

double dv_threshold_infV(double T, double eta, double eps) {
  if (!(T > 0.0 && T <= 1.0)) throw DomainError("attenuation must lie in (0, 1]");
  require_channel(eta);
  if (!(eps >= 0.0)) throw DomainError("excess noise must be >= 0");
  const double threshold =
      eps == 0.0 ? 1.0 / (T * (1.0 - eta))
                 : (1.0 - eps) / (T * (1.0 - eta + eta * eps)) - eps / T;
  if (!(threshold > 0.0)) {
    throw NoPositiveThreshold("channel excess noise leaves no tolerable preparation noise");
  }
  return threshold;
}

double t_opt_analytic(double V, double dV, double eta, double eps) {
  if (!(V >= 1.0)) throw DomainError("source variance must be >= 1");
  if (!(dV >= 0.0)) throw DomainError("preparation noise must be >= 0");
  require_channel(eta);
  if (dV == 0.0) return 1.0;
  const double w = V + dV - 1.0;
  const double radicand =
      (w * (eta * eps + 1.0) - eta * dV) / (dV * (eta * eps + 1.0 - eta));
  if (!(radicand > 0.0)) {
    throw NoPurificationGain("optimal attenuation radicand is not positive");
  }
  const double t = (std::sqrt(radicand) - 1.0) / w;
  if (!(t > 0.0)) throw NoPurificationGain("no modulation: attenuation cannot raise the rate");
  return std::min(t, 1.0);
}

double didt_at_zero(double V, double eta, double receiver_noise) {
  if (!(V >= 1.0)) throw DomainError("source variance must be >= 1");
  if (!(receiver_noise >= 0.0)) throw DomainError("receiver noise must be >= 0");
  return eta * (V - 1.0) / ((1.0 + receiver_noise) * 2.0 * std::numbers::ln2);
}

EtaBound eta_bound(double V, double dV, double N) {
  if (!(V > 1.0)) throw DomainError("eta bound needs V > 1");
  if (!(N >= 1.0)) throw DomainError("eavesdropper EPR variance must be >= 1");
  if (!(dV >= 0.0)) throw DomainError("preparation noise must be >= 0");
  const double s = V + dV;
  const double inner = 1.0 - V - dV + dV * s * s;
  if (inner == 0.0) return {1.0, false};
  const double value = 1.0 / (1.0 + (V - 1.0) / (N * inner));
  if (!(value > 0.0 && value < 1.0)) return {1.0, false};
  return {value, true};
}

double rate_infV_optimal(double eta, double chi, double eps) {
  require_channel(eta);
  if (!(chi >= 0.0 && eps >= 0.0)) throw DomainError("noises must be >= 0");
  if (chi != 0.0 && eps != 0.0) {
    throw DomainError("ceiling is defined for chi = 0 or eps = 0");
  }
  if (eps == 0.0) {
    return half_log2((1.0 + chi * (1.0 - eta)) / ((1.0 + chi) * (1.0 - eta)));
  }
  return half_log2(1.0 / (eta * eps + 1.0 - eta)) - half_log2(1.0 + eta * eps);
}

}  // namespace cvqkd::analytic
