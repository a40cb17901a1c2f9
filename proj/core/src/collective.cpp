#include "cvqkd/collective.hpp"

#include "cvqkd/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cvqkd::collective {

using gaussian::CovarianceMatrix;
using gaussian::Matrix;
using gaussian::Mode;
using gaussian::Quadrature;
using gaussian::Real;

PurificationModel PurificationModel::for_noise(double dV, double tn) {
  if (!(dV >= 0.0)) throw DomainError("preparation noise must be >= 0");
  if (dV == 0.0) return {1.0, 1.0};
  if (!(tn > 0.0 && tn < 1.0)) {
    throw DomainError("noise coupling transmittance must lie in (0, 1)");
  }
  return {tn, 1.0 + dV / (1.0 - tn)};
}

FiveModeState build_abcfg(double V, const PurificationModel& pm, double T, double eta,
                          double eps) {
  using namespace gaussian;
  if (!(pm.tn > 0.0 && pm.tn <= 1.0) || !(pm.dv0 >= 1.0)) {
    throw DomainError("noise source needs 0 < tn <= 1 and dv0 >= 1");
  }
  const Mode b = mode(ModeName::B), c = mode(ModeName::C), g = mode(ModeName::G);
  auto cm = compose({epr_source(V), CovarianceMatrix::vacuum(), epr_source(pm.dv0)});
  if (pm.tn < 1.0) cm = beam_splitter(cm, b, g, pm.tn);
  cm = beam_splitter(cm, b, c, T);
  cm = loss_channel(cm, b, eta, eps);

  ProtocolParams p;
  p.V = V;
  p.dV = pm.injected_noise();
  p.T = T;
  p.eta = eta;
  p.eps = eps;
  return {std::move(cm), p, pm};
}

FiveModeState build_abcfg(const ProtocolParams& params, const PurificationModel& pm) {
  params.validate();
  const double injected = pm.injected_noise();
  if (std::abs(injected - params.dV) > 1e-12 * std::max(1.0, params.dV)) {
    throw DomainError("noise source injects " + std::to_string(injected) +
                      " but dV = " + std::to_string(params.dV));
  }
  const double eps = params.eps + params.chi / params.eta;
  FiveModeState s = build_abcfg(params.V, pm, params.T, params.eta, eps);
  s.params.dV = params.dV;
  return s;
}

double holevo_direct(double V, double dV, double T, double chi, double eta) {
  ProtocolParams p{V, dV, T, chi, eta, 0.0};
  p.validate();
  const Real v_b0 = static_cast<Real>(T) * (static_cast<Real>(V) + dV) + 1.0L - T;
  const Real e = eta;
  const Real v_e = (1.0L - e) * v_b0 + e;
  const Real v_b = e * v_b0 + 1.0L - e + chi;
  const Real c_be = std::sqrt(e * (1.0L - e)) * (1.0L - v_b0);

  Matrix be = Matrix::Zero(4, 4);
  be(0, 0) = be(1, 1) = v_b;
  be(2, 2) = be(3, 3) = v_e;
  be(0, 2) = be(2, 0) = c_be;
  be(1, 3) = be(3, 1) = c_be;
  const CovarianceMatrix state(std::move(be));

  const double s_e = gaussian::von_neumann_entropy(state.marginal({Mode{1}}));
  const double s_e_given_b = gaussian::von_neumann_entropy(
      gaussian::homodyne_condition(state, Mode{0}, Quadrature::x));
  return s_e - s_e_given_b;
}

double holevo_purification(const FiveModeState& state) {
  const double s_all = gaussian::von_neumann_entropy(state.cm);
  const double s_cond = gaussian::von_neumann_entropy(
      gaussian::homodyne_condition(state.cm, mode(ModeName::B), Quadrature::x));
  return s_all - s_cond;
}

double holevo_purification_extrapolated(const ProtocolParams& params, double tn) {
  const double coarse = holevo_purification(
      build_abcfg(params, PurificationModel::for_noise(params.dV, tn)));
  const double fine_tn = 1.0 - 0.5 * (1.0 - tn);
  const double fine = holevo_purification(
      build_abcfg(params, PurificationModel::for_noise(params.dV, fine_tn)));
  return 2.0 * fine - coarse;
}

double mutual_information_ab(const ProtocolParams& p) {
  p.validate();
  const Real v = p.V;
  const Real t = p.T;
  const Real e = p.eta;
  const Real v_b = e * (t * (v + p.dV) + 1.0L - t) + 1.0L - e + e * p.eps + p.chi;
  const Real c2 = t * e * (v * v - 1.0L);
  const Real v_a_given_b = v - c2 / v_b;
  return static_cast<double>(0.5L * std::log2((v + 1.0L) / (v_a_given_b + 1.0L)));
}

KeyRateResult collective_rate(const ProtocolParams& p, HolevoMethod method, double beta,
                              double tn) {
  p.validate();
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw DomainError("reconciliation efficiency must lie in [0, 1]");
  }
  if (method == HolevoMethod::automatic) {
    method = p.eps == 0.0 ? HolevoMethod::direct : HolevoMethod::purification;
  }
  KeyRateResult r;
  r.attack = Attack::collective;
  r.params = p;
  r.beta = beta;
  r.i_ab = mutual_information_ab(p);
  if (method == HolevoMethod::direct) {
    if (p.eps != 0.0) {
      throw DomainError("direct Holevo construction requires a pure-loss channel (eps = 0)");
    }
    r.eve_info = holevo_direct(p.V, p.dV, p.T, p.chi, p.eta);
  } else {
    r.eve_info = holevo_purification(build_abcfg(p, PurificationModel::for_noise(p.dV, tn)));
  }
  r.rate = beta * r.i_ab - r.eve_info;
  return r;
}

SeriesCoefficients exact_series_coefficients() {
  const double inv_ln4 = 1.0 / (2.0 * std::numbers::ln2);
  return {inv_ln4, -(1.0 + std::numbers::ln2) * inv_ln4, inv_ln4};
}

double evaluate_series(const SeriesCoefficients& c, double eta, double eps) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("series needs 0 < eta < 1");
  if (!(eps >= 0.0)) throw DomainError("excess noise must be >= 0");
  const double ne = eta * eps;
  if (!(ne < 1.0)) throw DomainError("series needs eta * eps < 1");
  double r = c.linear * eta + c.noise * ne;
  if (ne > 0.0) r += c.noise_log * ne * std::log(ne);
  return r;
}

double series_rate_infV(double eta, double eps) {
  return evaluate_series(kSeriesCoefficients, eta, eps);
}

double fitted_rate_infV(double eta, double eps) {
  return evaluate_series(kFittedCoefficients, eta, eps);
}

}  // namespace cvqkd::collective
