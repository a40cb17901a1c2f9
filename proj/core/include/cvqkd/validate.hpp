#pragma once

// Cross-method validation suites. Each suite returns measured discrepancies
// next to the limits they are judged against.

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cvqkd::validate {

struct Check {
  std::string name;
  double measured = 0.0;
  std::string limit;  ///< human-readable acceptance band
  bool passed = false;
};

struct Report {
  std::string suite;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const;
};

struct Options {
  std::uint64_t seed = 20100101;
  unsigned jobs = 0;
  int samples = 1000;  ///< rms_deviation and series_fit sample count
};

Report analytic_vs_symplectic(const Options& opt = {});
Report direct_vs_purification(const Options& opt = {});
Report topt(const Options& opt = {});
Report series_fit(const Options& opt = {});
Report rms_deviation(const Options& opt = {});

const std::vector<std::string>& suite_names();
/// Throws ConfigError for an unknown name.
Report run(std::string_view suite, const Options& opt = {});

void print(const Report& report, std::ostream& out);

/// Deterministic uniform sampler, identical on every platform.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed);
  double uniform(double lo, double hi);

 private:
  std::uint64_t state_;
};

// Least-squares fit of a eta + b eta eps + c eta eps ln(eta eps).
struct SeriesFit {
  std::array<double, 3> coefficients{};
  double residual_rms = 0.0;
};
SeriesFit fit_series(const std::vector<double>& eta, const std::vector<double>& eps,
                     const std::vector<double>& rate);

struct RmsStatistics {
  double V = 0.0;
  int n = 0;
  double s = 0.0;              ///< sample standard deviation of (pure - purified)
  double mean_pure = 0.0;      ///< mean dV = 0 rate
  double relative = 0.0;       ///< s / mean_pure
  double mean_relative = 0.0;  ///< mean of |pure - purified| / pure
};

/// Purified collective rate at V versus the dV = 0, T = 1 rate over n points
/// drawn uniformly from eta, eps in (0.01, 0.1), dV in (0, 5).
RmsStatistics rms_statistics(double V, const Options& opt);

}  // namespace cvqkd::validate
