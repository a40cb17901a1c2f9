#pragma once

// Grid sweeps over protocol parameters with CSV emission.

#include "cvqkd/collective.hpp"
#include "cvqkd/protocol.hpp"
#include "cvqkd/reconciliation.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cvqkd::sweep {

enum class Quantity {
  individual_rate,
  collective_rate,
  holevo,
  dv_max,
  eps_max,
  t_opt,
  snr_surface,
  i_eff,
};

enum class Scale { linear, log };

/// Which threshold/rate variant to evaluate: T = 1, T optimized (or fixed by
/// the SNR for reconciliation quantities), or both as an innermost dimension.
enum class Purified { no, yes, both };

struct Axis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  int steps = 2;
  Scale scale = Scale::linear;

  std::vector<double> values() const;
};

struct SweepSpec {
  Quantity quantity = Quantity::collective_rate;
  std::map<std::string, double> fixed;
  std::vector<Axis> axes;
  Attack attack = Attack::collective;
  collective::HolevoMethod method = collective::HolevoMethod::automatic;
  Purified purified = Purified::no;
  double tn = collective::kDefaultNoiseCoupling;
  double cap = 0.0;        ///< > 0 adds a column with thresholds clipped at cap
  bool db_column = false;  ///< adds 10 log10 of thresholds
  std::string output;      ///< empty: stdout
  /// When set, beta is read from the table at each point's SNR instead of
  /// being fixed or swept; points outside the table are left empty.
  std::optional<reconciliation::BetaTable> beta_table;

  /// Throws ConfigError describing the first problem found.
  void validate() const;
};

/// Empty cells mark infeasible points.
using Cell = std::variant<std::monostate, double, std::string>;

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Column index by name; throws ConfigError when absent.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

/// Evaluates every grid point, row-major in axis order (last axis fastest).
/// Results do not depend on `jobs`.
SweepTable run_sweep(const SweepSpec& spec, unsigned jobs = 0);

/// Header plus one line per row; numbers with 9 significant digits, +inf as
/// `inf`, empty cells for infeasible points, LF line endings.
void write_csv(const SweepTable& table, std::ostream& out);
std::string format_number(double v);

std::string_view to_string(Quantity q);
std::string_view to_string(Scale s);
std::string_view to_string(Purified p);
std::string_view to_string(collective::HolevoMethod m);
Quantity parse_quantity(std::string_view s);
Scale parse_scale(std::string_view s);
Purified parse_purified(std::string_view s);
Attack parse_attack(std::string_view s);
collective::HolevoMethod parse_method(std::string_view s);

/// Names accepted for `fixed` entries and axes.
const std::vector<std::string>& parameter_names();

/// Figure presets: fig2, fig3, fig4, fig5a, fig5b, fig6, fig7, fig8.
SweepSpec figure_preset(std::string_view name, int points_per_axis = 41);
const std::vector<std::string>& preset_names();

}  // namespace cvqkd::sweep
