#pragma once

// Imperfect reconciliation: key rates with efficiency beta < 1, the channel
// output signal-to-noise ratio Sigma, and noise thresholds parametrized by
// (beta, Sigma) on a pure-loss channel.

#include "cvqkd/optimize.hpp"
#include "cvqkd/protocol.hpp"

#include <filesystem>
#include <istream>
#include <vector>

namespace cvqkd::reconciliation {

struct ReconParams {
  double beta = 1.0;  ///< reconciliation efficiency, [0, 1]
  double snr = 1.0;   ///< Sigma > 0

  void validate() const;
};

/// Sigma = T eta (V - 1) / (1 + T eta dV).
double snr(double V, double dV, double T, double eta);

/// Source variance giving `snr` at T = 1: V = 1 + Sigma (1 + eta dV) / eta.
double v_from_snr(double snr, double dV, double eta);

/// Attenuation giving `snr`: T = Sigma / (eta (V - 1 - Sigma dV)). Throws
/// InfeasibleSnr when that would require T > 1 or a non-positive T.
double t_from_snr(double snr, double V, double dV, double eta);

/// Largest dV for which t_from_snr(snr, V, dV, eta) stays <= 1. Throws
/// InfeasibleSnr if even dV = 0 is infeasible.
double dv_feasibility_limit(double snr, double V, double eta);

/// beta * i_ab - chi_be.
double effective_rate(double beta, double i_ab, double chi_be);

/// Collective effective rate at T = 1 with V eliminated through v_from_snr,
/// evaluated by the covariance-matrix (direct) construction.
double i_eff_unpurified(const ReconParams& rp, double dV, double eta);

/// Same quantity written natively in (Sigma, dV, eta) through the modulation
/// variance sigma = Sigma (1 + eta dV) / eta, with closed-form symplectic
/// eigenvalues. Independent of the covariance-matrix code.
double i_eff_unpurified_closed_form(const ReconParams& rp, double dV, double eta);

/// Collective effective rate with T fixed by the SNR at source variance V.
double i_eff_purified(const ReconParams& rp, double V, double dV, double eta);

/// Individual-attack counterpart of i_eff_unpurified. Not part of the
/// threshold surfaces; provided for comparison only.
double i_eff_individual_unpurified(const ReconParams& rp, double dV, double eta);

/// Preparation-noise threshold at T = 1 (V eliminated by the SNR).
optimize::ThresholdResult dv_max_unpurified(const ReconParams& rp, double eta,
                                            const optimize::Tolerances& tol = {});

/// Preparation-noise threshold when T is re-solved from the SNR at each probe.
/// When the rate stays positive up to dv_feasibility_limit the result carries
/// status `feasibility` and that limit as value; if the SNR is unreachable at
/// dV = 0 the status is `infeasible`.
optimize::ThresholdResult dv_max_purified(const ReconParams& rp, double V, double eta,
                                          const optimize::Tolerances& tol = {});

/// Display cap for purified thresholds.
inline constexpr double kDisplayCap = 10.0;

/// User-supplied efficiency curve beta(Sigma), linearly interpolated.
class BetaTable {
 public:
  /// Rows (Sigma, beta); Sigma strictly ascending, beta in [0, 1], >= 2 rows.
  explicit BetaTable(std::vector<std::pair<double, double>> rows);

  /// Two-column CSV. Blank lines, '#' comments and one non-numeric header
  /// row are skipped. Throws ConfigError on malformed input.
  static BetaTable from_csv(std::istream& in);
  static BetaTable from_csv(const std::filesystem::path& path);

  /// Throws DomainError outside [first Sigma, last Sigma].
  double operator()(double snr) const;

  double snr_min() const { return rows_.front().first; }
  double snr_max() const { return rows_.back().first; }
  const std::vector<std::pair<double, double>>& rows() const { return rows_; }

 private:
  std::vector<std::pair<double, double>> rows_;
};

}  // namespace cvqkd::reconciliation
