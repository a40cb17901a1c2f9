#pragma once

// Maximization over the purifying attenuation and bisection thresholds on
// noise parameters.

#include "cvqkd/collective.hpp"
#include "cvqkd/protocol.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace cvqkd::optimize {

/// Key-rate evaluator for one attack model.
struct RateModel {
  Attack attack = Attack::collective;
  collective::HolevoMethod method = collective::HolevoMethod::automatic;
  double beta = 1.0;
  double tn = collective::kDefaultNoiseCoupling;

  KeyRateResult evaluate(const ProtocolParams& params) const;
  double operator()(const ProtocolParams& params) const { return evaluate(params).rate; }
};

struct Bracket {
  double lo = 0.0;
  double hi = 1.0;
};

struct Tolerances {
  double param = 1e-5;        ///< bracket width on the threshold parameter
  double rate = 1e-7;         ///< |rate| at a converged root, bits
  double attenuation = 1e-6;  ///< relative tolerance on T_star
  double probe_cap = 1e3;     ///< largest noise probed before reporting +inf
  int max_iterations = 200;
};

struct MaximizeResult {
  double t_star = 1.0;
  double rate_star = 0.0;
  int evaluations = 0;
  bool fallback = false;  ///< coarse scan was not unimodal; dense grid used
};

/// Maximizes `rate(T)` over T in (0, 1]. A logarithmic scan brackets the
/// optimum, then golden-section search refines it in log T. If the scan is
/// not unimodal, a 1e-3 uniform grid is added before refinement.
MaximizeResult maximize_rate_over_T(const std::function<double(double)>& rate,
                                    const Tolerances& tol = {});

MaximizeResult maximize_rate_over_T(const RateModel& model, ProtocolParams params,
                                    const Tolerances& tol = {});

enum class ThresholdStatus {
  root,           ///< sign change located by bisection
  insecure,       ///< rate not positive at the lower end; value = lower end
  unbounded,      ///< rate positive up to the probe cap; value = +inf
  feasibility,    ///< rate positive up to a feasibility limit; value = that limit
  infeasible,     ///< no feasible point at the lower end
};

struct ThresholdResult {
  double value = 0.0;
  double achieved_rate = 0.0;
  int iterations = 0;
  bool converged = false;
  ThresholdStatus status = ThresholdStatus::root;
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section maximization of a unimodal f on [lo, hi] to bracket width tol.
GoldenResult golden_section_maximize(const std::function<double(double)>& f,
                                     Bracket bracket, double tol);

/// Bisection for a sign change of f with f(lo) > 0 >= f(hi).
ThresholdResult bisect(const std::function<double(double)>& f, Bracket bracket,
                       const Tolerances& tol);

/// Largest x in [lo, limit] such that f stays positive on [lo, x]. f is probed
/// on a geometric ladder from `first_probe` to find the first sign change,
/// which is then refined by bisection until the bracket is narrower than
/// tol.param and |f(value)| <= tol.rate.
ThresholdResult find_threshold(const std::function<double(double)>& f, double lo,
                               double first_probe, double limit, const Tolerances& tol);

/// Preparation-noise threshold. With `purified` the rate is maximized over T
/// at every probe, otherwise T = 1.
ThresholdResult dv_max(Attack attack, double V, double eta, double eps, double chi,
                       bool purified, const Tolerances& tol = {},
                       double tn = collective::kDefaultNoiseCoupling);

/// Maximal tolerable channel excess noise (collective attack, purification
/// construction throughout).
ThresholdResult eps_max(double V, double dV, double eta, bool purified,
                        const Tolerances& tol = {},
                        double tn = collective::kDefaultNoiseCoupling);

/// Smallest channel transmittivity for which the individual rate is positive
/// when the eavesdropper's EPR variance N is held fixed, i.e.
/// eps = (N - 1)(1 - eta) / eta. The key is secure for eta above the returned
/// value. With `purified` the rate is maximized over T, otherwise T = 1.
ThresholdResult eta_min_secure(double V, double dV, double N, bool purified,
                               const Tolerances& tol = {});

struct RegionPoint {
  double eta = 0.0;
  double eps = 0.0;
  ThresholdResult dv_max;
};

/// Purified collective dV_max on the (eta, eps) grid, row-major in eta.
std::vector<RegionPoint> security_region(double V, const std::vector<double>& eta_grid,
                                         const std::vector<double>& eps_grid,
                                         const Tolerances& tol = {}, unsigned jobs = 0);

struct SurfacePoint {
  double eps = 0.0;
  double dV = 0.0;
  double t_star = 1.0;
  double rate = 0.0;      ///< raw maximal rate
  double rate_floored = 0.0;
};

/// Maximal collective rate over T on the (eps, dV) grid, row-major in eps.
std::vector<SurfacePoint> max_rate_surface(double V, double eta,
                                           const std::vector<double>& eps_grid,
                                           const std::vector<double>& dv_grid,
                                           unsigned jobs = 0);

}  // namespace cvqkd::optimize
