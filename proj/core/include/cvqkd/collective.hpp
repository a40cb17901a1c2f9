#pragma once

// Collective-attack (Holevo) bounds. Two constructions are provided:
//  * direct: the eavesdropper holds the single environment mode of a
//    pure-loss beam splitter; valid for eps = 0 with trusted detector noise.
//  * purification: the sender's noisy source is purified into five modes
//    (A, B, C, F, G) and the eavesdropper holds the purification of the whole
//    state, so chi_BE = S(ABCFG) - S(ACFG | x_B); valid for any eps.

#include "cvqkd/gaussian.hpp"
#include "cvqkd/protocol.hpp"

#include <cstddef>

namespace cvqkd::collective {

/// Default transmittance of the coupler that injects preparation noise.
inline constexpr double kDefaultNoiseCoupling = 1.0 - 1e-4;

/// Entangled noise source EPR(dv0) coupled into the signal at transmittance
/// tn. The coupler injects (1 - tn)(dv0 - 1) of excess noise above vacuum.
struct PurificationModel {
  double tn = 1.0;
  double dv0 = 1.0;

  /// Model injecting exactly `dV`; dV = 0 gives tn = 1, dv0 = 1 (no coupling).
  static PurificationModel for_noise(double dV, double tn = kDefaultNoiseCoupling);
  double injected_noise() const { return (1.0 - tn) * (dv0 - 1.0); }
};

enum class ModeName : std::size_t { A = 0, B = 1, C = 2, F = 3, G = 4 };

constexpr gaussian::Mode mode(ModeName m) {
  return gaussian::Mode{static_cast<std::size_t>(m)};
}

struct FiveModeState {
  gaussian::CovarianceMatrix cm;
  ProtocolParams params;
  PurificationModel purification;
};

/// EPR(V) on (A, B), vacuum C, EPR(dv0) on (F, G); then B-G coupler at tn,
/// B-C attenuator at T, and the channel (eta, eps) on B.
FiveModeState build_abcfg(double V, const PurificationModel& purification, double T,
                          double eta, double eps);

/// Builds the state for `params`, checking that the model injects params.dV.
/// params.chi is treated as untrusted and folded into the channel noise.
FiveModeState build_abcfg(const ProtocolParams& params,
                          const PurificationModel& purification);

/// Holevo bound from the eavesdropper's single channel mode. Requires eps = 0;
/// chi is trusted and enters only Bob's variance.
double holevo_direct(double V, double dV, double T, double chi, double eta);

/// S(ABCFG) - S(ACFG | x_B).
double holevo_purification(const FiveModeState& state);

/// Two-point Richardson extrapolation of the purification Holevo bound in
/// (1 - tn): 2 chi(tn') - chi(tn) with 1 - tn' = (1 - tn) / 2.
double holevo_purification_extrapolated(const ProtocolParams& params,
                                        double tn = kDefaultNoiseCoupling);

/// Shannon information between Alice's heterodyne outcome and Bob's homodyne.
double mutual_information_ab(const ProtocolParams& params);

enum class HolevoMethod { direct, purification, automatic };

/// beta * I_AB - chi_BE. `automatic` uses the direct construction when eps = 0
/// and the purification construction otherwise.
KeyRateResult collective_rate(const ProtocolParams& params,
                              HolevoMethod method = HolevoMethod::automatic,
                              double beta = 1.0, double tn = kDefaultNoiseCoupling);

struct SeriesCoefficients {
  double linear;     ///< coefficient of eta
  double noise;      ///< coefficient of eta * eps
  double noise_log;  ///< coefficient of eta * eps * ln(eta * eps)
};

/// Leading-order expansion of the dV = 0 rate for V -> infinity, eta -> 0.
inline constexpr SeriesCoefficients kSeriesCoefficients{0.721, -1.221, 0.721};
/// Least-squares fit of the optimally purified V -> infinity rate.
inline constexpr SeriesCoefficients kFittedCoefficients{0.722, -1.237, 0.731};

/// Unrounded series coefficients: 1/ln4, -(1 + ln2)/ln4, 1/ln4.
SeriesCoefficients exact_series_coefficients();

double evaluate_series(const SeriesCoefficients& c, double eta, double eps);
double series_rate_infV(double eta, double eps);
double fitted_rate_infV(double eta, double eps);

}  // namespace cvqkd::collective
