#include "cvqkd/optimize.hpp"

#include "cvqkd/analytic.hpp"
#include "cvqkd/errors.hpp"
#include "cvqkd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cvqkd::optimize {
namespace {

constexpr int kScanPoints = 29;          // 1e-7 .. 1, four per decade
constexpr double kScanLowest = 1e-7;
constexpr double kFlatTol = 1e-15;

std::vector<double> log_scan() {
  std::vector<double> t(kScanPoints);
  for (int k = 0; k < kScanPoints; ++k) {
    t[k] = std::pow(10.0, std::log10(kScanLowest) * (1.0 - double(k) / (kScanPoints - 1)));
  }
  t.back() = 1.0;
  return t;
}

// Number of interior local maxima after dropping flat steps.
int count_peaks(const std::vector<double>& v) {
  int peaks = 0;
  int last = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double d = v[i] - v[i - 1];
    const double scale = std::max({1.0, std::abs(v[i]), std::abs(v[i - 1])});
    if (std::abs(d) <= kFlatTol * scale) continue;
    const int sign = d > 0 ? 1 : -1;
    if (last == 1 && sign == -1) ++peaks;
    last = sign;
  }
  if (last == 1) ++peaks;  // rising into T = 1
  return peaks;
}

}  // namespace

KeyRateResult RateModel::evaluate(const ProtocolParams& p) const {
  if (attack == Attack::collective) return collective::collective_rate(p, method, beta, tn);
  KeyRateResult r = (p.chi != 0.0 && p.eps != 0.0) ? analytic::individual_rate_cloner(p)
                                                   : analytic::individual_rate(p);
  if (beta != 1.0) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
    r.beta = beta;
    r.rate = beta * r.i_ab - r.eve_info;
  }
  return r;
}

GoldenResult golden_section_maximize(const std::function<double(double)>& f,
                                     Bracket bracket, double tol) {
  constexpr double inv_phi = std::numbers::phi - 1.0;
  double a = bracket.lo;
  double b = bracket.hi;
  if (!(a < b)) throw DomainError("golden section needs lo < hi");
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc >= fd ? GoldenResult{c, fc, evals} : GoldenResult{d, fd, evals};
}

MaximizeResult maximize_rate_over_T(const std::function<double(double)>& rate,
                                    const Tolerances& tol) {
  std::vector<double> grid = log_scan();
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values[k] = rate(grid[k]);
  MaximizeResult out;
  out.evaluations = static_cast<int>(grid.size());

  if (count_peaks(values) > 1) {
    out.fallback = true;
    for (int i = 1; i < 1000; ++i) grid.push_back(i * 1e-3);
    std::vector<std::size_t> order(grid.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::ranges::sort(order, {}, [&](std::size_t i) { return grid[i]; });
    std::vector<double> sorted_grid, sorted_values;
    for (std::size_t i : order) {
      sorted_grid.push_back(grid[i]);
      sorted_values.push_back(i < values.size() ? values[i] : rate(grid[i]));
    }
    out.evaluations += 999;
    grid = std::move(sorted_grid);
    values = std::move(sorted_values);
  }

  const auto best = static_cast<std::size_t>(
      std::ranges::max_element(values) - values.begin());
  const double lo = best > 0 ? grid[best - 1] : grid.front() * 1e-3;
  const double hi = best + 1 < grid.size() ? grid[best + 1] : 1.0;
  out.t_star = grid[best];
  out.rate_star = values[best];

  auto in_log = [&](double u) { return rate(std::exp(u)); };
  const GoldenResult g =
      golden_section_maximize(in_log, {std::log(lo), std::log(hi)}, tol.attenuation);
  out.evaluations += g.evaluations;
  if (g.value > out.rate_star) {
    out.t_star = std::exp(g.x);
    out.rate_star = g.value;
  }
  return out;
}

MaximizeResult maximize_rate_over_T(const RateModel& model, ProtocolParams params,
                                    const Tolerances& tol) {
  params.T = 1.0;
  params.validate();
  return maximize_rate_over_T(
      [&](double t) {
        ProtocolParams q = params;
        q.T = t;
        return model(q);
      },
      tol);
}

ThresholdResult bisect(const std::function<double(double)>& f, Bracket bracket,
                       const Tolerances& tol) {
  double a = bracket.lo;
  double b = bracket.hi;
  ThresholdResult out;
  out.status = ThresholdStatus::root;
  for (int it = 1; it <= tol.max_iterations; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    out.value = m;
    out.achieved_rate = fm;
    out.iterations = it;
    if (fm > 0.0) {
      a = m;
    } else {
      b = m;
    }
    if (b - a <= tol.param && std::abs(fm) <= tol.rate) {
      out.converged = true;
      break;
    }
    if (b - a <= std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(m))) break;
  }
  return out;
}

ThresholdResult find_threshold(const std::function<double(double)>& f, double lo,
                               double first_probe, double limit, const Tolerances& tol) {
  const double f_lo = f(lo);
  if (!(f_lo > 0.0)) {
    return {lo, f_lo, 0, false, ThresholdStatus::insecure};
  }
  double prev = lo;
  double x = std::min(first_probe, limit);
  int probes = 0;
  for (;;) {
    ++probes;
    const double fx = f(x);
    if (!(fx > 0.0)) break;
    if (x >= limit) return {kUnbounded, fx, probes, false, ThresholdStatus::unbounded};
    prev = x;
    x = std::min(2.0 * x, limit);
  }
  ThresholdResult r = bisect(f, {prev, x}, tol);
  r.iterations += probes;
  return r;
}

ThresholdResult dv_max(Attack attack, double V, double eta, double eps, double chi,
                       bool purified, const Tolerances& tol, double tn) {
  RateModel model;
  model.attack = attack;
  model.tn = tn;
  const ProtocolParams base{V, 0.0, 1.0, chi, eta, eps};
  base.validate();
  auto rate_at = [&](double dv) {
    ProtocolParams p = base;
    p.dV = dv;
    return purified ? maximize_rate_over_T(model, p, tol).rate_star : model(p);
  };
  return find_threshold(rate_at, 0.0, 0.5, tol.probe_cap, tol);
}

ThresholdResult eps_max(double V, double dV, double eta, bool purified,
                        const Tolerances& tol, double tn) {
  RateModel model;
  model.attack = Attack::collective;
  model.method = collective::HolevoMethod::purification;
  model.tn = tn;
  const ProtocolParams base{V, dV, 1.0, 0.0, eta, 0.0};
  base.validate();
  auto rate_at = [&](double eps) {
    ProtocolParams p = base;
    p.eps = eps;
    return purified ? maximize_rate_over_T(model, p, tol).rate_star : model(p);
  };
  return find_threshold(rate_at, 0.0, 0.01, tol.probe_cap, tol);
}

ThresholdResult eta_min_secure(double V, double dV, double N, bool purified,
                               const Tolerances& tol) {
  if (!(N >= 1.0)) throw DomainError("eavesdropper EPR variance must be >= 1");
  RateModel model;
  model.attack = Attack::individual;
  // Parametrized by loss = 1 - eta so that the secure side is the lower end.
  auto rate_at = [&](double loss) {
    const double eta = 1.0 - loss;
    ProtocolParams p{V, dV, 1.0, 0.0, eta, (N - 1.0) * loss / eta};
    return purified ? maximize_rate_over_T(model, p, tol).rate_star : model(p);
  };
  constexpr double kLowestLoss = 1e-9;
  ThresholdResult r = find_threshold(rate_at, kLowestLoss, 1e-3, 1.0 - 1e-9, tol);
  if (r.status == ThresholdStatus::unbounded) {
    r.value = 0.0;
  } else if (r.status == ThresholdStatus::insecure) {
    r.value = 1.0;
  } else {
    r.value = 1.0 - r.value;
  }
  return r;
}

std::vector<RegionPoint> security_region(double V, const std::vector<double>& eta_grid,
                                         const std::vector<double>& eps_grid,
                                         const Tolerances& tol, unsigned jobs) {
  const std::size_t n_eps = eps_grid.size();
  return parallel_map(eta_grid.size() * n_eps, jobs, [&](std::size_t i) {
    const double eta = eta_grid[i / n_eps];
    const double eps = eps_grid[i % n_eps];
    return RegionPoint{eta, eps, dv_max(Attack::collective, V, eta, eps, 0.0, true, tol)};
  });
}

std::vector<SurfacePoint> max_rate_surface(double V, double eta,
                                           const std::vector<double>& eps_grid,
                                           const std::vector<double>& dv_grid,
                                           unsigned jobs) {
  const std::size_t n_dv = dv_grid.size();
  const RateModel model;
  return parallel_map(eps_grid.size() * n_dv, jobs, [&](std::size_t i) {
    const ProtocolParams p{V, dv_grid[i % n_dv], 1.0, 0.0, eta, eps_grid[i / n_dv]};
    const MaximizeResult m = maximize_rate_over_T(model, p);
    return SurfacePoint{p.eps, p.dV, m.t_star, m.rate_star, std::max(0.0, m.rate_star)};
  });
}

}  // namespace cvqkd::optimize
