#include "cli/spec_json.hpp"

#include "cvqkd/errors.hpp"

#include <charconv>
#include <fstream>
#include <set>

namespace cvqkd::cli {
namespace {

using nlohmann::json;

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  return v.get<double>();
}

std::string text(const json& v, const std::string& what) {
  if (!v.is_string()) throw ConfigError(what + " must be a string");
  return v.get<std::string>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double parse_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("cannot parse " + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

sweep::SweepSpec spec_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("sweep spec must be a JSON object");
  reject_unknown(doc,
                 {"quantity", "fixed", "axes", "attack", "method", "purified", "tn", "cap",
                  "db_column", "output", "beta_table"},
                 "sweep spec");
  sweep::SweepSpec spec;
  if (!doc.contains("quantity")) throw ConfigError("sweep spec needs 'quantity'");
  spec.quantity = sweep::parse_quantity(text(doc["quantity"], "quantity"));
  if (doc.contains("fixed")) {
    if (!doc["fixed"].is_object()) throw ConfigError("'fixed' must be an object");
    for (const auto& [k, v] : doc["fixed"].items()) spec.fixed[k] = number(v, "fixed." + k);
  }
  if (doc.contains("axes")) {
    if (!doc["axes"].is_array()) throw ConfigError("'axes' must be an array");
    for (const json& a : doc["axes"]) {
      if (!a.is_object()) throw ConfigError("each axis must be an object");
      reject_unknown(a, {"name", "min", "max", "steps", "scale"}, "axis");
      for (const char* k : {"name", "min", "max", "steps"}) {
        if (!a.contains(k)) throw ConfigError(std::string("axis needs '") + k + "'");
      }
      sweep::Axis axis;
      axis.name = text(a["name"], "axis name");
      axis.min = number(a["min"], "axis min");
      axis.max = number(a["max"], "axis max");
      if (!a["steps"].is_number_integer()) throw ConfigError("axis steps must be an integer");
      axis.steps = a["steps"].get<int>();
      if (a.contains("scale")) axis.scale = sweep::parse_scale(text(a["scale"], "axis scale"));
      spec.axes.push_back(std::move(axis));
    }
  }
  if (doc.contains("attack")) spec.attack = sweep::parse_attack(text(doc["attack"], "attack"));
  if (doc.contains("method")) spec.method = sweep::parse_method(text(doc["method"], "method"));
  if (doc.contains("purified")) {
    const json& p = doc["purified"];
    if (p.is_boolean()) {
      spec.purified = p.get<bool>() ? sweep::Purified::yes : sweep::Purified::no;
    } else {
      spec.purified = sweep::parse_purified(text(p, "purified"));
    }
  }
  if (doc.contains("tn")) spec.tn = number(doc["tn"], "tn");
  if (doc.contains("cap")) spec.cap = number(doc["cap"], "cap");
  if (doc.contains("db_column")) {
    if (!doc["db_column"].is_boolean()) throw ConfigError("db_column must be a boolean");
    spec.db_column = doc["db_column"].get<bool>();
  }
  if (doc.contains("output")) spec.output = text(doc["output"], "output");
  if (doc.contains("beta_table")) {
    const json& t = doc["beta_table"];
    if (t.is_string()) {
      std::filesystem::path path = t.get<std::string>();
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      spec.beta_table = reconciliation::BetaTable::from_csv(path);
    } else if (t.is_array()) {
      std::vector<std::pair<double, double>> rows;
      for (const json& r : t) {
        if (!r.is_array() || r.size() != 2) throw ConfigError("beta_table rows are [snr, beta]");
        rows.emplace_back(number(r[0], "beta_table snr"), number(r[1], "beta_table beta"));
      }
      spec.beta_table = reconciliation::BetaTable(std::move(rows));
    } else {
      throw ConfigError("beta_table must be a CSV path or an array of [snr, beta]");
    }
  }
  return spec;
}

sweep::SweepSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("spec file " + path.string() + ": " + e.what());
  }
  return spec_from_json(doc, path.parent_path());
}

json spec_to_json(const sweep::SweepSpec& spec) {
  json doc;
  doc["quantity"] = sweep::to_string(spec.quantity);
  doc["fixed"] = json::object();
  for (const auto& [k, v] : spec.fixed) doc["fixed"][k] = v;
  doc["axes"] = json::array();
  for (const sweep::Axis& a : spec.axes) {
    doc["axes"].push_back({{"name", a.name},
                           {"min", a.min},
                           {"max", a.max},
                           {"steps", a.steps},
                           {"scale", sweep::to_string(a.scale)}});
  }
  doc["attack"] = to_string(spec.attack);
  doc["method"] = sweep::to_string(spec.method);
  doc["purified"] = sweep::to_string(spec.purified);
  doc["tn"] = spec.tn;
  doc["cap"] = spec.cap;
  doc["db_column"] = spec.db_column;
  if (!spec.output.empty()) doc["output"] = spec.output;
  if (spec.beta_table) {
    json rows = json::array();
    for (const auto& [s, b] : spec.beta_table->rows()) rows.push_back({s, b});
    doc["beta_table"] = rows;
  }
  return doc;
}

std::pair<std::string, double> parse_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("expected name=value, got '" + s + "'");
  }
  return {s.substr(0, eq), parse_number(s.substr(eq + 1), "value of " + s.substr(0, eq))};
}

sweep::Axis parse_axis(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto colon = s.find(':', start);
    parts.push_back(s.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 4 && parts.size() != 5) {
    throw ConfigError("expected name:min:max:steps[:linear|log], got '" + s + "'");
  }
  sweep::Axis a;
  a.name = parts[0];
  a.min = parse_number(parts[1], "axis min");
  a.max = parse_number(parts[2], "axis max");
  const double steps = parse_number(parts[3], "axis steps");
  if (steps != static_cast<int>(steps)) throw ConfigError("axis steps must be an integer");
  a.steps = static_cast<int>(steps);
  if (parts.size() == 5) a.scale = sweep::parse_scale(parts[4]);
  return a;
}

}  // namespace cvqkd::cli
