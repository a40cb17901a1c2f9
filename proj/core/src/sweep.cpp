#include "cvqkd/sweep.hpp"

#include "cvqkd/analytic.hpp"
#include "cvqkd/errors.hpp"
#include "cvqkd/optimize.hpp"
#include "cvqkd/parallel.hpp"
#include "cvqkd/reconciliation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace cvqkd::sweep {
namespace {

using optimize::ThresholdResult;
using optimize::ThresholdStatus;

struct QuantityInfo {
  std::set<std::string> required;
  std::set<std::string> optional;
  bool supports_purified = false;
};

QuantityInfo info(Quantity q, Purified purified) {
  switch (q) {
    case Quantity::individual_rate:
    case Quantity::collective_rate:
      return {{"V", "eta"}, {"dV", "T", "chi", "eps", "beta"}, true};
    case Quantity::holevo:
      return {{"V", "eta"}, {"dV", "T", "chi", "eps"}, false};
    case Quantity::dv_max:
      return {{"V", "eta"}, {"eps", "chi"}, true};
    case Quantity::eps_max:
      return {{"V", "eta"}, {"dV"}, true};
    case Quantity::t_opt:
      return {{"V", "dV", "eta"}, {"eps"}, false};
    case Quantity::snr_surface:
      if (purified == Purified::no) return {{"beta", "snr", "eta"}, {}, true};
      return {{"beta", "snr", "eta", "V"}, {}, true};
    case Quantity::i_eff:
      if (purified == Purified::no) return {{"beta", "snr", "eta"}, {"dV"}, true};
      return {{"beta", "snr", "eta", "V"}, {"dV"}, true};
  }
  return {};
}

std::string_view status_name(ThresholdStatus s) {
  switch (s) {
    case ThresholdStatus::root: return "root";
    case ThresholdStatus::insecure: return "insecure";
    case ThresholdStatus::unbounded: return "unbounded";
    case ThresholdStatus::feasibility: return "feasibility";
    case ThresholdStatus::infeasible: return "infeasible";
  }
  return "?";
}

using Params = std::map<std::string, double>;

double get(const Params& p, const std::string& name, double fallback) {
  const auto it = p.find(name);
  return it == p.end() ? fallback : it->second;
}

ProtocolParams protocol(const Params& p) {
  return {get(p, "V", 1.0),   get(p, "dV", 0.0),  get(p, "T", 1.0),
          get(p, "chi", 0.0), get(p, "eta", 1.0), get(p, "eps", 0.0)};
}

Cell number_or_empty(double v) {
  if (std::isnan(v)) return std::monostate{};
  return v;
}

class Evaluator {
 public:
  explicit Evaluator(const SweepSpec& spec) : spec_(spec) {}

  std::vector<std::string> value_columns() const {
    const bool cap = spec_.cap > 0.0;
    switch (spec_.quantity) {
      case Quantity::individual_rate:
      case Quantity::collective_rate:
        return {"T", "i_ab", "eve_info", "rate"};
      case Quantity::holevo:
        return {"holevo"};
      case Quantity::dv_max:
      case Quantity::snr_surface: {
        std::vector<std::string> c{"dv_max"};
        if (cap) c.emplace_back("dv_max_capped");
        if (spec_.db_column) c.emplace_back("dv_max_db");
        c.insert(c.end(), {"status", "converged", "achieved_rate"});
        return c;
      }
      case Quantity::eps_max:
        return {"eps_max", "status", "converged", "achieved_rate"};
      case Quantity::t_opt:
        return {"t_opt", "t_star", "rate_at_t_opt"};
      case Quantity::i_eff:
        return {"T", "i_eff"};
    }
    return {};
  }

  std::vector<Cell> evaluate(const Params& p, bool purified) const {
    switch (spec_.quantity) {
      case Quantity::individual_rate:
      case Quantity::collective_rate:
        return rate(p, purified);
      case Quantity::holevo:
        return {holevo(p)};
      case Quantity::dv_max: {
        const ProtocolParams q = protocol(p);
        return threshold(optimize::dv_max(spec_.attack, q.V, q.eta, q.eps, q.chi, purified,
                                          {}, spec_.tn),
                         true);
      }
      case Quantity::eps_max: {
        const ProtocolParams q = protocol(p);
        return threshold(optimize::eps_max(q.V, q.dV, q.eta, purified, {}, spec_.tn), false);
      }
      case Quantity::t_opt:
        return t_opt(p);
      case Quantity::snr_surface:
        return snr_surface(p, purified);
      case Quantity::i_eff:
        return i_eff(p, purified);
    }
    return {};
  }

 private:
  optimize::RateModel model(const Params& p) const {
    optimize::RateModel m;
    m.attack = spec_.quantity == Quantity::individual_rate ? Attack::individual
                                                            : Attack::collective;
    m.method = spec_.method;
    m.beta = get(p, "beta", 1.0);
    m.tn = spec_.tn;
    return m;
  }

  std::vector<Cell> rate(const Params& p, bool purified) const {
    const optimize::RateModel m = model(p);
    ProtocolParams q = protocol(p);
    if (purified) q.T = optimize::maximize_rate_over_T(m, q).t_star;
    const KeyRateResult r = m.evaluate(q);
    return {q.T, r.i_ab, r.eve_info, r.rate};
  }

  double holevo(const Params& p) const {
    const ProtocolParams q = protocol(p);
    collective::HolevoMethod method = spec_.method;
    if (method == collective::HolevoMethod::automatic) {
      method = q.eps == 0.0 ? collective::HolevoMethod::direct
                            : collective::HolevoMethod::purification;
    }
    if (method == collective::HolevoMethod::direct) {
      return collective::holevo_direct(q.V, q.dV, q.T, q.chi, q.eta);
    }
    return collective::holevo_purification(
        collective::build_abcfg(q, collective::PurificationModel::for_noise(q.dV, spec_.tn)));
  }

  std::vector<Cell> threshold(const ThresholdResult& r, bool dv) const {
    std::vector<Cell> c{number_or_empty(r.value)};
    if (dv && spec_.cap > 0.0) {
      c.push_back(std::isnan(r.value) ? Cell{} : Cell{std::min(r.value, spec_.cap)});
    }
    if (dv && spec_.db_column) {
      c.push_back(std::isnan(r.value) ? Cell{} : Cell{10.0 * std::log10(r.value)});
    }
    c.emplace_back(std::string(status_name(r.status)));
    c.emplace_back(r.converged ? 1.0 : 0.0);
    c.push_back(number_or_empty(r.status == ThresholdStatus::infeasible
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : r.achieved_rate));
    return c;
  }

  std::vector<Cell> t_opt(const Params& p) const {
    const ProtocolParams q = protocol(p);
    optimize::RateModel m;
    m.attack = Attack::individual;
    const double t_star = optimize::maximize_rate_over_T(m, q).t_star;
    try {
      ProtocolParams at = q;
      at.T = analytic::t_opt_analytic(q.V, q.dV, q.eta, q.eps);
      return {at.T, t_star, m(at)};
    } catch (const NoPurificationGain&) {
      return {Cell{}, t_star, Cell{}};
    }
  }

  std::vector<Cell> snr_surface(const Params& p, bool purified) const {
    const reconciliation::ReconParams rp{get(p, "beta", 1.0), get(p, "snr", 1.0)};
    const double eta = get(p, "eta", 1.0);
    if (purified) return threshold(reconciliation::dv_max_purified(rp, get(p, "V", 1.0), eta), true);
    return threshold(reconciliation::dv_max_unpurified(rp, eta), true);
  }

  std::vector<Cell> i_eff(const Params& p, bool purified) const {
    const reconciliation::ReconParams rp{get(p, "beta", 1.0), get(p, "snr", 1.0)};
    const double eta = get(p, "eta", 1.0);
    const double dv = get(p, "dV", 0.0);
    if (!purified) return {1.0, reconciliation::i_eff_unpurified(rp, dv, eta)};
    try {
      const double V = get(p, "V", 1.0);
      return {reconciliation::t_from_snr(rp.snr, V, dv, eta),
              reconciliation::i_eff_purified(rp, V, dv, eta)};
    } catch (const InfeasibleSnr&) {
      return {Cell{}, Cell{}};
    }
  }

  const SweepSpec& spec_;
};

template <typename E>
E parse_enum(std::string_view s, std::initializer_list<E> all, std::string_view what) {
  std::string valid;
  for (E e : all) {
    if (to_string(e) == s) return e;
    if (!valid.empty()) valid += ", ";
    valid += to_string(e);
  }
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(s) +
                    "' (valid: " + valid + ")");
}

}  // namespace

std::vector<double> Axis::values() const {
  std::vector<double> v(static_cast<std::size_t>(std::max(steps, 0)));
  for (int k = 0; k < steps; ++k) {
    const double f = static_cast<double>(k) / (steps - 1);
    v[k] = scale == Scale::linear ? min + f * (max - min)
                                  : std::exp(std::log(min) + f * (std::log(max) - std::log(min)));
  }
  if (steps >= 2) {
    v.front() = min;
    v.back() = max;
  }
  return v;
}

const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names{"V", "dV", "T", "chi", "eta", "eps", "beta", "snr"};
  return names;
}

void SweepSpec::validate() const {
  const auto& known = parameter_names();
  auto is_known = [&](const std::string& n) {
    return std::ranges::find(known, n) != known.end();
  };
  if (axes.empty() || axes.size() > 3) throw ConfigError("a sweep needs 1 to 3 axes");
  const QuantityInfo qi = info(quantity, purified);
  std::set<std::string> seen;
  for (const auto& [name, value] : fixed) {
    if (!is_known(name)) throw ConfigError("unknown parameter '" + name + "'");
    if (!std::isfinite(value)) throw ConfigError("fixed value of '" + name + "' is not finite");
    seen.insert(name);
  }
  for (const Axis& a : axes) {
    if (!is_known(a.name)) throw ConfigError("unknown axis '" + a.name + "'");
    if (!seen.insert(a.name).second) {
      throw ConfigError("parameter '" + a.name + "' given more than once");
    }
    if (a.steps < 2) throw ConfigError("axis '" + a.name + "' needs steps >= 2");
    if (!std::isfinite(a.min) || !std::isfinite(a.max) || !(a.min <= a.max)) {
      throw ConfigError("axis '" + a.name + "' needs finite min <= max");
    }
    if (a.scale == Scale::log && !(a.min > 0.0)) {
      throw ConfigError("log axis '" + a.name + "' needs min > 0");
    }
  }
  if (beta_table) {
    if (seen.contains("beta")) throw ConfigError("beta comes from the table; do not set it");
    if (!qi.required.contains("snr")) {
      throw ConfigError("a beta table needs an SNR-parametrized quantity");
    }
    seen.insert("beta");
  }
  for (const std::string& r : qi.required) {
    if (!seen.contains(r)) {
      throw ConfigError("quantity " + std::string(to_string(quantity)) + " needs parameter '" +
                        r + "' (fixed or axis)");
    }
  }
  for (const std::string& n : seen) {
    if (!qi.required.contains(n) && !qi.optional.contains(n)) {
      throw ConfigError("parameter '" + n + "' is not used by " +
                        std::string(to_string(quantity)));
    }
  }
  if (purified != Purified::no && !qi.supports_purified) {
    throw ConfigError(std::string(to_string(quantity)) + " has no purified variant");
  }
  const bool rate_like =
      quantity == Quantity::individual_rate || quantity == Quantity::collective_rate;
  if (rate_like && purified != Purified::no && seen.contains("T")) {
    throw ConfigError("T is optimized when purified; do not fix or sweep it");
  }
  const bool may_have_eps =
      seen.contains("eps") && !(fixed.contains("eps") && fixed.at("eps") == 0.0);
  const bool uses_method = quantity == Quantity::collective_rate || quantity == Quantity::holevo;
  if (uses_method && method == collective::HolevoMethod::direct && may_have_eps) {
    throw ConfigError("direct Holevo method requires eps = 0");
  }
  if (!(tn > 0.0 && tn < 1.0)) throw ConfigError("tn must lie in (0, 1)");
  if (cap < 0.0) throw ConfigError("cap must be >= 0");
}

SweepTable run_sweep(const SweepSpec& spec, unsigned jobs) {
  spec.validate();
  const Evaluator eval(spec);
  std::vector<std::vector<double>> grids;
  std::size_t n = 1;
  for (const Axis& a : spec.axes) {
    grids.push_back(a.values());
    n *= grids.back().size();
  }
  std::vector<char> variants;
  if (spec.purified == Purified::both) {
    variants = {false, true};
  } else {
    variants = {spec.purified == Purified::yes};
  }

  SweepTable table;
  for (const Axis& a : spec.axes) table.columns.push_back(a.name);
  if (spec.purified == Purified::both) table.columns.emplace_back("purified");
  if (spec.beta_table) table.columns.emplace_back("beta");
  const std::vector<std::string> values = eval.value_columns();
  table.columns.insert(table.columns.end(), values.begin(), values.end());

  const std::size_t per_point = variants.size();
  auto rows = parallel_map(n * per_point, jobs, [&](std::size_t i) {
    const std::size_t point = i / per_point;
    const bool purified = variants[i % per_point];
    Params p = spec.fixed;
    std::vector<Cell> row;
    std::size_t rest = point;
    std::vector<double> coords(grids.size());
    for (std::size_t k = grids.size(); k-- > 0;) {
      coords[k] = grids[k][rest % grids[k].size()];
      rest /= grids[k].size();
    }
    for (std::size_t k = 0; k < grids.size(); ++k) {
      p[spec.axes[k].name] = coords[k];
      row.emplace_back(coords[k]);
    }
    if (spec.purified == Purified::both) row.emplace_back(purified ? 1.0 : 0.0);
    if (spec.beta_table) {
      const double snr = p.at("snr");
      if (snr < spec.beta_table->snr_min() || snr > spec.beta_table->snr_max()) {
        row.resize(row.size() + 1 + values.size());
        return row;
      }
      p["beta"] = (*spec.beta_table)(snr);
      row.emplace_back(p["beta"]);
    }
    for (auto& c : eval.evaluate(p, purified)) row.push_back(std::move(c));
    return row;
  });
  table.rows = std::move(rows);
  return table;
}

std::size_t SweepTable::column(std::string_view name) const {
  const auto it = std::ranges::find(columns, name);
  if (it == columns.end()) throw ConfigError("no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

double SweepTable::number(std::size_t row, std::string_view name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const double* d = std::get_if<double>(&c)) return *d;
  return std::numeric_limits<double>::quiet_NaN();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_csv(const SweepTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (const double* d = std::get_if<double>(&row[i])) {
        out << format_number(*d);
      } else if (const std::string* s = std::get_if<std::string>(&row[i])) {
        out << *s;
      }
    }
    out << '\n';
  }
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::individual_rate: return "individual_rate";
    case Quantity::collective_rate: return "collective_rate";
    case Quantity::holevo: return "holevo";
    case Quantity::dv_max: return "dv_max";
    case Quantity::eps_max: return "eps_max";
    case Quantity::t_opt: return "t_opt";
    case Quantity::snr_surface: return "snr_surface";
    case Quantity::i_eff: return "i_eff";
  }
  return "?";
}

std::string_view to_string(Scale s) { return s == Scale::linear ? "linear" : "log"; }

std::string_view to_string(Purified p) {
  switch (p) {
    case Purified::no: return "false";
    case Purified::yes: return "true";
    case Purified::both: return "both";
  }
  return "?";
}

std::string_view to_string(collective::HolevoMethod m) {
  switch (m) {
    case collective::HolevoMethod::direct: return "direct";
    case collective::HolevoMethod::purification: return "purification";
    case collective::HolevoMethod::automatic: return "auto";
  }
  return "?";
}

Quantity parse_quantity(std::string_view s) {
  using enum Quantity;
  return parse_enum(s, {individual_rate, collective_rate, holevo, dv_max, eps_max, t_opt,
                        snr_surface, i_eff},
                    "quantity");
}

Scale parse_scale(std::string_view s) {
  return parse_enum(s, {Scale::linear, Scale::log}, "scale");
}

Purified parse_purified(std::string_view s) {
  return parse_enum(s, {Purified::no, Purified::yes, Purified::both}, "purified mode");
}

Attack parse_attack(std::string_view s) {
  return parse_enum(s, {Attack::individual, Attack::collective}, "attack");
}

collective::HolevoMethod parse_method(std::string_view s) {
  using enum collective::HolevoMethod;
  return parse_enum(s, {direct, purification, automatic}, "method");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig2",  "fig3", "fig4", "fig5a",
                                              "fig5b", "fig6", "fig7", "fig8"};
  return names;
}

SweepSpec figure_preset(std::string_view name, int n) {
  if (n < 2) throw ConfigError("preset resolution needs >= 2 points per axis");
  SweepSpec s;
  if (name == "fig2" || name == "fig3") {
    s.quantity = Quantity::collective_rate;
    s.fixed = {{"V", 20.0}, {"eta", 0.01}, {"eps", 0.0}};
    if (name == "fig2") s.fixed["T"] = 1.0;
    s.axes = {{"chi", 0.0, 1.0, n}, {"dV", 0.0, 12.0, n}};
    s.method = collective::HolevoMethod::direct;
    s.purified = name == "fig3" ? Purified::yes : Purified::no;
  } else if (name == "fig4") {
    s.quantity = Quantity::eps_max;
    s.fixed = {{"eta", 0.01}};
    s.axes = {{"V", 10.0, 1e5, 2, Scale::log}, {"dV", 0.0, 5.0, n}};
    s.purified = Purified::both;
  } else if (name == "fig5a" || name == "fig5b") {
    s.quantity = Quantity::collective_rate;
    s.fixed = {{"V", name == "fig5a" ? 10.0 : 100.0}, {"eta", 0.01}};
    s.axes = {{"eps", 0.0, 0.1, n}, {"dV", 0.0, 10.0, n}};
    s.purified = Purified::yes;
  } else if (name == "fig6") {
    s.quantity = Quantity::dv_max;
    s.fixed = {{"V", 100.0}};
    s.axes = {{"eta", 0.01, 0.1, n}, {"eps", 0.01, 0.1, n}};
    s.purified = Purified::yes;
    s.db_column = true;
  } else if (name == "fig7") {
    s.quantity = Quantity::snr_surface;
    s.fixed = {{"eta", 0.1}};
    s.axes = {{"beta", 0.5, 1.0, n}, {"snr", 0.05, 1.85, n}};
    s.purified = Purified::no;
  } else if (name == "fig8") {
    s.quantity = Quantity::snr_surface;
    s.fixed = {{"V", 20.0}, {"eta", 0.1}};
    s.axes = {{"beta", 0.5, 1.0, n}, {"snr", 0.05, 1.85, n}};
    s.purified = Purified::yes;
    s.cap = reconciliation::kDisplayCap;
  } else {
    std::string valid;
    for (const auto& p : preset_names()) valid += (valid.empty() ? "" : ", ") + p;
    throw ConfigError("unknown preset '" + std::string(name) + "' (valid: " + valid + ")");
  }
  return s;
}

}  // namespace cvqkd::sweep
