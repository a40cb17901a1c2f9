#include "cvqkd/reconciliation.hpp"

#include "cvqkd/analytic.hpp"
#include "cvqkd/collective.hpp"
#include "cvqkd/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace cvqkd::reconciliation {
namespace {

constexpr double kRoundTripSlack = 1e-12;

void require_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
}

long double g_bits(long double x) {
  if (x <= 1e-12L) return 0.0L;
  return (x + 1.0L) * std::log2(x + 1.0L) - x * std::log2(x);
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

void ReconParams::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("SNR must be positive");
}

double snr(double V, double dV, double T, double eta) {
  ProtocolParams{V, dV, T, 0.0, eta, 0.0}.validate();
  return T * eta * (V - 1.0) / (1.0 + T * eta * dV);
}

double v_from_snr(double snr, double dV, double eta) {
  if (!(snr > 0.0)) throw DomainError("SNR must be positive");
  if (!(dV >= 0.0)) throw DomainError("preparation noise must be >= 0");
  require_eta(eta);
  return 1.0 + snr * (1.0 + eta * dV) / eta;
}

double t_from_snr(double snr, double V, double dV, double eta) {
  if (!(snr > 0.0)) throw DomainError("SNR must be positive");
  if (!(dV >= 0.0)) throw DomainError("preparation noise must be >= 0");
  require_eta(eta);
  const double den = eta * (V - 1.0 - snr * dV);
  if (!(den > 0.0)) throw InfeasibleSnr("SNR unreachable at any attenuation");
  const double t = snr / den;
  if (t > 1.0 + kRoundTripSlack) throw InfeasibleSnr("SNR would need T > 1");
  return std::min(t, 1.0);
}

double dv_feasibility_limit(double snr, double V, double eta) {
  if (!(snr > 0.0)) throw DomainError("SNR must be positive");
  require_eta(eta);
  const double limit = (eta * (V - 1.0) - snr) / (eta * snr);
  if (limit < -kRoundTripSlack) throw InfeasibleSnr("SNR above eta (V - 1)");
  return std::max(limit, 0.0);
}

double effective_rate(double beta, double i_ab, double chi_be) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  return beta * i_ab - chi_be;
}

double i_eff_unpurified(const ReconParams& rp, double dV, double eta) {
  rp.validate();
  const ProtocolParams p{v_from_snr(rp.snr, dV, eta), dV, 1.0, 0.0, eta, 0.0};
  return collective::collective_rate(p, collective::HolevoMethod::direct, rp.beta).rate;
}

double i_eff_unpurified_closed_form(const ReconParams& rp, double dV, double eta) {
  rp.validate();
  if (!(dV >= 0.0)) throw DomainError("preparation noise must be >= 0");
  require_eta(eta);
  const long double e = eta;
  const long double s = static_cast<long double>(rp.snr) * (1.0L + e * dV) / e;
  const long double v = 1.0L + s;
  const long double v_b = (1.0L + rp.snr) * (1.0L + e * dV);
  const long double v_a_given_b = v - e * s * (s + 2.0L) / v_b;
  const long double i_ab = 0.5L * std::log2((v + 1.0L) / (v_a_given_b + 1.0L));

  const long double excess = s + dV;
  const long double v_e = 1.0L + (1.0L - e) * excess;
  const long double c2 = e * (1.0L - e) * excess * excess;
  const long double nu_cond = std::sqrt(v_e * (v_e - c2 / v_b));
  const long double holevo = g_bits((v_e - 1.0L) / 2.0L) - g_bits((nu_cond - 1.0L) / 2.0L);
  return static_cast<double>(rp.beta * i_ab - holevo);
}

double i_eff_purified(const ReconParams& rp, double V, double dV, double eta) {
  rp.validate();
  const ProtocolParams p{V, dV, t_from_snr(rp.snr, V, dV, eta), 0.0, eta, 0.0};
  return collective::collective_rate(p, collective::HolevoMethod::direct, rp.beta).rate;
}

double i_eff_individual_unpurified(const ReconParams& rp, double dV, double eta) {
  rp.validate();
  const ProtocolParams p{v_from_snr(rp.snr, dV, eta), dV, 1.0, 0.0, eta, 0.0};
  const KeyRateResult r = analytic::individual_rate(p);
  return effective_rate(rp.beta, r.i_ab, r.eve_info);
}

optimize::ThresholdResult dv_max_unpurified(const ReconParams& rp, double eta,
                                            const optimize::Tolerances& tol) {
  rp.validate();
  require_eta(eta);
  return optimize::find_threshold([&](double dv) { return i_eff_unpurified(rp, dv, eta); },
                                  0.0, 0.5, tol.probe_cap, tol);
}

optimize::ThresholdResult dv_max_purified(const ReconParams& rp, double V, double eta,
                                          const optimize::Tolerances& tol) {
  rp.validate();
  double limit = 0.0;
  try {
    limit = dv_feasibility_limit(rp.snr, V, eta);
  } catch (const InfeasibleSnr&) {
    optimize::ThresholdResult r;
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.status = optimize::ThresholdStatus::infeasible;
    return r;
  }
  const double upper = std::min(limit, tol.probe_cap);
  auto rate_at = [&](double dv) { return i_eff_purified(rp, V, std::min(dv, limit), eta); };
  optimize::ThresholdResult r = optimize::find_threshold(rate_at, 0.0, 0.5, upper, tol);
  if (r.status == optimize::ThresholdStatus::unbounded && limit <= tol.probe_cap) {
    r.value = limit;
    r.status = optimize::ThresholdStatus::feasibility;
  }
  return r;
}

BetaTable::BetaTable(std::vector<std::pair<double, double>> rows) : rows_(std::move(rows)) {
  if (rows_.size() < 2) throw ConfigError("beta table needs at least two rows");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto [s, b] = rows_[i];
    if (!std::isfinite(s) || !(b >= 0.0 && b <= 1.0)) {
      throw ConfigError("beta table row " + std::to_string(i + 1) +
                        ": need finite SNR and beta in [0, 1]");
    }
    if (i > 0 && !(s > rows_[i - 1].first)) {
      throw ConfigError("beta table SNR column must be strictly ascending");
    }
  }
}

BetaTable BetaTable::from_csv(std::istream& in) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto comma = line.find(',');
    double s = 0.0, b = 0.0;
    const bool ok = comma != std::string::npos &&
                    line.find(',', comma + 1) == std::string::npos &&
                    parse_double(std::string_view(line).substr(0, comma), s) &&
                    parse_double(std::string_view(line).substr(comma + 1), b);
    if (!ok) {
      if (rows.empty() && !header_seen) {
        header_seen = true;
        continue;
      }
      throw ConfigError("beta table line " + std::to_string(line_no) +
                        ": expected two numeric columns");
    }
    rows.emplace_back(s, b);
  }
  return BetaTable(std::move(rows));
}

BetaTable BetaTable::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open beta table " + path.string());
  return from_csv(in);
}

double BetaTable::operator()(double snr) const {
  if (!(snr >= snr_min() && snr <= snr_max())) {
    std::ostringstream msg;
    msg << "SNR " << snr << " outside beta table range [" << snr_min() << ", " << snr_max()
        << "]";
    throw DomainError(msg.str());
  }
  const auto hi = std::ranges::lower_bound(rows_, snr, {}, [](const auto& r) { return r.first; });
  if (hi->first == snr) return hi->second;
  const auto lo = hi - 1;
  const double w = (snr - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

}  // namespace cvqkd::reconciliation
