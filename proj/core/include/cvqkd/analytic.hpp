#pragma once

// Closed-form individual-attack key rates and security thresholds for noisy
// coherent states with sender-side purifying attenuation.

#include "cvqkd/protocol.hpp"

namespace cvqkd::analytic {

/// Variance of each mode of the eavesdropper's EPR pair in the entangling
/// cloner that emulates a channel (eta, eps): N = 1 + eta eps / (1 - eta).
struct CloneParams {
  double N = 1.0;

  static CloneParams from_channel(double eta, double eps);
};

/// Individual-attack rate for a pure-loss channel with trusted detection noise.
/// Requires params.eps == 0.
KeyRateResult individual_rate_detection(const ProtocolParams& params);

/// Individual-attack rate for a lossy channel with untrusted excess noise
/// attacked by an entangling cloner. Requires params.chi == 0.
KeyRateResult individual_rate_channel(const ProtocolParams& params);

/// Dispatches to the detection-noise or channel-noise formula; throws when
/// both chi and eps are non-zero.
KeyRateResult individual_rate(const ProtocolParams& params);

/// Same bound rebuilt from covariance matrices: the source and attenuator are
/// explicit modes, the channel is an entangling cloner with eavesdropper modes
/// (E1, E2), and the eavesdropper's conditional variance is obtained by
/// homodyning x on both of her modes. Accepts chi and eps simultaneously.
KeyRateResult individual_rate_cloner(const ProtocolParams& params);

/// Preparation noise at which the unattenuated (T = 1) individual rate
/// crosses zero. Independent of the detection noise. Returns 0 for V = 1.
double dv_threshold_individual(double V, double eta);

/// Preparation-noise threshold of the V -> infinity individual rate at
/// attenuation T. Throws NoPositiveThreshold when no positive value exists.
double dv_threshold_infV(double T, double eta, double eps);

/// Attenuation maximizing the channel-noise individual rate, clamped to (0, 1].
/// Returns 1 for dV == 0.
double t_opt_analytic(double V, double dV, double eta, double eps);

/// dI/dT at T = 0, where `receiver_noise` is chi (trusted detector) or
/// eta * eps (channel noise). Logarithms are base 2, hence the 1 / ln 4.
double didt_at_zero(double V, double eta, double receiver_noise);

struct EtaBound {
  double value = 1.0;
  bool restricted = false;  ///< false: the bound imposes no restriction
};

/// Supremum of channel transmittivities for which optimal purification keeps
/// the key secure, with the eavesdropper's EPR variance N held fixed.
EtaBound eta_bound(double V, double dV, double N);

/// Rate ceiling reached with optimal purification and V -> infinity, equal to
/// the dV = 0, V -> infinity rate. At most one of chi, eps may be non-zero.
double rate_infV_optimal(double eta, double chi, double eps);

}  // namespace cvqkd::analytic
