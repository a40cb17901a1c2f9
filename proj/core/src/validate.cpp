#include "cvqkd/validate.hpp"

#include "cvqkd/analytic.hpp"
#include "cvqkd/collective.hpp"
#include "cvqkd/errors.hpp"
#include "cvqkd/optimize.hpp"
#include "cvqkd/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace cvqkd::validate {
namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

Check at_most(std::string name, double measured, double limit) {
  return {std::move(name), measured, fmt("<= %.3g", limit), measured <= limit};
}

Check within(std::string name, double measured, double lo, double hi) {
  return {std::move(name), measured, fmt("in [%.6g, %.6g]", lo, hi),
          measured >= lo && measured <= hi};
}

Check reported(std::string name, double measured) {
  return {std::move(name), measured, "reported", true};
}

template <typename Fn>
Report timed(std::string suite, Fn&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r{std::move(suite), body(), 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

const std::map<std::string, std::function<Report(const Options&)>, std::less<>>& registry() {
  static const std::map<std::string, std::function<Report(const Options&)>, std::less<>> r{
      {"analytic_vs_symplectic", analytic_vs_symplectic},
      {"direct_vs_purification", direct_vs_purification},
      {"topt", topt},
      {"series_fit", series_fit},
      {"rms_deviation", rms_deviation},
  };
  return r;
}

double purified_rate(const ProtocolParams& p) {
  const optimize::RateModel model;
  return optimize::maximize_rate_over_T(model, p).rate_star;
}

}  // namespace

bool Report::passed() const {
  return std::ranges::all_of(checks, [](const Check& c) { return c.passed; });
}

Sampler::Sampler(std::uint64_t seed) : state_(seed) {}

double Sampler::uniform(double lo, double hi) {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

SeriesFit fit_series(const std::vector<double>& eta, const std::vector<double>& eps,
                     const std::vector<double>& rate) {
  const auto n = static_cast<Eigen::Index>(rate.size());
  if (n < 3 || eta.size() != rate.size() || eps.size() != rate.size()) {
    throw DomainError("series fit needs >= 3 matching samples");
  }
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ne = eta[i] * eps[i];
    if (!(ne > 0.0)) throw DomainError("series fit needs eta * eps > 0");
    a(i, 0) = eta[i];
    a(i, 1) = ne;
    a(i, 2) = ne * std::log(ne);
    y(i) = rate[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
  SeriesFit fit;
  fit.coefficients = {c(0), c(1), c(2)};
  fit.residual_rms = std::sqrt((a * c - y).squaredNorm() / static_cast<double>(n));
  return fit;
}

RmsStatistics rms_statistics(double V, const Options& opt) {
  Sampler rng(opt.seed);
  std::vector<ProtocolParams> points(static_cast<std::size_t>(opt.samples));
  for (auto& p : points) {
    p.V = V;
    p.eta = rng.uniform(0.01, 0.1);
    p.dV = rng.uniform(0.0, 5.0);
    p.eps = rng.uniform(0.01, 0.1);
  }
  struct Pair {
    double pure, purified;
  };
  const auto pairs = parallel_map(points.size(), opt.jobs, [&](std::size_t i) {
    ProtocolParams pure = points[i];
    pure.dV = 0.0;
    return Pair{collective::collective_rate(pure).rate, purified_rate(points[i])};
  });
  RmsStatistics st;
  st.V = V;
  st.n = opt.samples;
  double ss = 0.0, sum_pure = 0.0, sum_rel = 0.0;
  for (const Pair& q : pairs) {
    const double d = q.pure - q.purified;
    ss += d * d;
    sum_pure += q.pure;
    sum_rel += std::abs(d) / std::abs(q.pure);
  }
  st.s = std::sqrt(ss / (st.n - 1));
  st.mean_pure = sum_pure / st.n;
  st.relative = st.s / st.mean_pure;
  st.mean_relative = sum_rel / st.n;
  return st;
}

Report analytic_vs_symplectic(const Options& opt) {
  return timed("analytic_vs_symplectic", [&] {
    Sampler rng(opt.seed);
    double worst_detection = 0.0, worst_channel = 0.0;
    for (int i = 0; i < 100; ++i) {
      ProtocolParams p;
      p.V = rng.uniform(1.5, 100.0);
      p.dV = rng.uniform(0.0, 5.0);
      p.T = rng.uniform(0.05, 1.0);
      p.eta = rng.uniform(0.01, 0.99);
      const double noise = rng.uniform(0.0, 1.0);
      ProtocolParams d = p;
      d.chi = noise;
      worst_detection = std::max(worst_detection,
                                 std::abs(analytic::individual_rate_detection(d).rate -
                                          analytic::individual_rate_cloner(d).rate));
      ProtocolParams c = p;
      c.eps = 0.2 * noise;
      worst_channel = std::max(worst_channel, std::abs(analytic::individual_rate_channel(c).rate -
                                                       analytic::individual_rate_cloner(c).rate));
    }
    return std::vector<Check>{
        at_most("detection-noise rate, max |closed form - cloner| (bits)", worst_detection, 1e-9),
        at_most("channel-noise rate, max |closed form - cloner| (bits)", worst_channel, 1e-9),
    };
  });
}

Report direct_vs_purification(const Options& opt) {
  return timed("direct_vs_purification", [&] {
    constexpr double kCoarse = 1.0 - 1e-4, kFine = 1.0 - 1e-5;
    std::vector<ProtocolParams> grid;
    for (double V : {5.0, 20.0, 100.0})
      for (double dV : {0.0, 0.5, 2.0})
        for (double T : {0.2, 1.0})
          for (double eta : {0.01, 0.1}) grid.push_back({V, dV, T, 0.0, eta, 0.0});
    struct Diff {
      double coarse, fine, extrapolated;
    };
    const auto diffs = parallel_map(grid.size(), opt.jobs, [&](std::size_t i) {
      const ProtocolParams& p = grid[i];
      const double direct = collective::holevo_direct(p.V, p.dV, p.T, 0.0, p.eta);
      auto purif = [&](double tn) {
        return collective::holevo_purification(
            collective::build_abcfg(p, collective::PurificationModel::for_noise(p.dV, tn)));
      };
      return Diff{std::abs(purif(kCoarse) - direct), std::abs(purif(kFine) - direct),
                  std::abs(collective::holevo_purification_extrapolated(p, kCoarse) - direct)};
    });
    double worst = 0.0, worst_fine = 0.0, worst_rich = 0.0;
    int not_decreasing = 0;
    for (const Diff& d : diffs) {
      worst = std::max(worst, d.coarse);
      worst_fine = std::max(worst_fine, d.fine);
      worst_rich = std::max(worst_rich, d.extrapolated);
      if (d.fine > d.coarse + 1e-12) ++not_decreasing;
    }
    return std::vector<Check>{
        at_most("max |purification - direct| at tn = 1 - 1e-4 (bits)", worst, 1e-3),
        at_most("max |purification - direct| at tn = 1 - 1e-5 (bits)", worst_fine, worst),
        at_most("points where the gap grows as tn -> 1", not_decreasing, 0),
        reported("max |extrapolated - direct| (bits)", worst_rich),
    };
  });
}

Report topt(const Options& opt) {
  return timed("topt", [&] {
    Sampler rng(opt.seed);
    optimize::RateModel model;
    model.attack = Attack::individual;
    double worst = 0.0;
    int skipped = 0;
    for (int i = 0; i < 50; ++i) {
      ProtocolParams p;
      p.V = rng.uniform(2.0, 100.0);
      p.dV = rng.uniform(0.1, 10.0);
      p.eta = rng.uniform(0.01, 0.5);
      p.eps = rng.uniform(0.0, 0.1);
      double t_analytic = 1.0;
      try {
        t_analytic = analytic::t_opt_analytic(p.V, p.dV, p.eta, p.eps);
      } catch (const NoPurificationGain&) {
        ++skipped;
        continue;
      }
      const double t_numeric = optimize::maximize_rate_over_T(model, p).t_star;
      worst = std::max(worst, std::abs(t_numeric - t_analytic));
    }
    const ProtocolParams spot{20.0, 1.0, 1.0, 0.0, 0.01, 0.0};
    const double t_spot = optimize::maximize_rate_over_T(model, spot).t_star;
    return std::vector<Check>{
        at_most("max |T_star - T_opt| over 50 random points", worst, 1e-4),
        within("T_star at V=20, dV=1, eta=0.01, eps=0", t_spot, 0.17468 - 1e-4, 0.17468 + 1e-4),
        reported("points without purification gain", skipped),
    };
  });
}

Report series_fit(const Options& opt) {
  return timed("series_fit", [&] {
    std::vector<Check> checks;
    const collective::SeriesCoefficients exact = collective::exact_series_coefficients();
    const collective::SeriesCoefficients printed = collective::kSeriesCoefficients;
    const double exact_dev = std::max({std::abs(exact.linear - printed.linear),
                                       std::abs(exact.noise - printed.noise),
                                       std::abs(exact.noise_log - printed.noise_log)});
    checks.push_back(at_most("max |expansion constant - (0.721, -1.221, 0.721)|", exact_dev, 0.005));

    // dV = 0 rate at small eta, where the first-order expansion holds.
    {
      Sampler rng(opt.seed ^ 0x5eedULL);
      std::vector<double> eta, eps, rate;
      for (int i = 0; i < 200; ++i) {
        eta.push_back(rng.uniform(1e-5, 1e-4));
        eps.push_back(rng.uniform(0.01, 0.1));
        rate.push_back(
            collective::collective_rate({1e5, 0.0, 1.0, 0.0, eta.back(), eps.back()}).rate);
      }
      const SeriesFit f = fit_series(eta, eps, rate);
      const double dev = std::max({std::abs(f.coefficients[0] - printed.linear),
                                   std::abs(f.coefficients[1] - printed.noise),
                                   std::abs(f.coefficients[2] - printed.noise_log)});
      checks.push_back(reported("dV=0 small-eta fit a", f.coefficients[0]));
      checks.push_back(reported("dV=0 small-eta fit b", f.coefficients[1]));
      checks.push_back(reported("dV=0 small-eta fit c", f.coefficients[2]));
      checks.push_back(at_most("max |dV=0 small-eta fit - (0.721, -1.221, 0.721)|", dev, 0.005));
    }

    // Optimally purified rate over the full region.
    {
      Sampler rng(opt.seed);
      std::vector<ProtocolParams> points(static_cast<std::size_t>(opt.samples));
      for (auto& p : points) {
        p.V = 1e5;
        p.eta = rng.uniform(0.01, 0.1);
        p.dV = rng.uniform(0.0, 5.0);
        p.eps = rng.uniform(0.01, 0.1);
      }
      const auto rate =
          parallel_map(points.size(), opt.jobs, [&](std::size_t i) { return purified_rate(points[i]); });
      std::vector<double> eta, eps;
      for (const auto& p : points) {
        eta.push_back(p.eta);
        eps.push_back(p.eps);
      }
      const SeriesFit f = fit_series(eta, eps, rate);
      const collective::SeriesCoefficients target = collective::kFittedCoefficients;
      checks.push_back(within("purified refit a", f.coefficients[0], target.linear - 0.02,
                              target.linear + 0.02));
      checks.push_back(within("purified refit b", f.coefficients[1], target.noise - 0.02,
                              target.noise + 0.02));
      checks.push_back(within("purified refit c", f.coefficients[2], target.noise_log - 0.02,
                              target.noise_log + 0.02));
      checks.push_back(reported("purified refit residual rms (bits)", f.residual_rms));
    }
    return checks;
  });
}

Report rms_deviation(const Options& opt) {
  return timed("rms_deviation", [&] {
    const RmsStatistics a = rms_statistics(1e5, opt);
    const RmsStatistics b = rms_statistics(1e6, opt);
    return std::vector<Check>{
        within("s at V=1e5 (bits)", a.s, 3e-5, 1.2e-4),
        within("s / mean rate at V=1e5", a.relative, 0.01, 0.03),
        reported("mean dV=0 rate at V=1e5 (bits)", a.mean_pure),
        reported("mean |relative deviation| at V=1e5", a.mean_relative),
        at_most("s / mean rate at V=1e6", b.relative, 0.01),
        reported("s at V=1e6 (bits)", b.s),
    };
  });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : registry()) n.push_back(k);
    return n;
  }();
  return names;
}

Report run(std::string_view suite, const Options& opt) {
  const auto it = registry().find(suite);
  if (it == registry().end()) {
    std::string valid;
    for (const auto& n : suite_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown suite '" + std::string(suite) + "' (valid: " + valid + ")");
  }
  return it->second(opt);
}

void print(const Report& report, std::ostream& out) {
  char buf[256];
  for (const Check& c : report.checks) {
    std::snprintf(buf, sizeof buf, "%-4s %-60s %-14.6g %s\n", c.passed ? "ok" : "FAIL",
                  c.name.c_str(), c.measured, c.limit.c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%s: %s (%.1f s)\n", report.suite.c_str(),
                report.passed() ? "passed" : "FAILED", report.seconds);
  out << buf;
}

}  // namespace cvqkd::validate
