#include "cli/app.hpp"

#include "cli/spec_json.hpp"
#include "cvqkd/analytic.hpp"
#include "cvqkd/errors.hpp"
#include "cvqkd/optimize.hpp"
#include "cvqkd/reconciliation.hpp"
#include "cvqkd/sweep.hpp"
#include "cvqkd/validate.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <optional>

namespace cvqkd::cli {
namespace {

using sweep::format_number;

struct ParamFlags {
  double V = 1.0, dV = 0.0, T = 1.0, chi = 0.0, eta = 1.0, eps = 0.0, beta = 1.0;
  double tn = collective::kDefaultNoiseCoupling;
  std::string attack = "collective";
  std::string method = "auto";

  void add_to(CLI::App& cmd, bool with_T) {
    cmd.add_option("--V", V, "source variance (>= 1)")->required();
    cmd.add_option("--dV", dV, "preparation noise");
    if (with_T) cmd.add_option("--T", T, "purifying attenuation in (0, 1]");
    cmd.add_option("--chi", chi, "trusted detection noise");
    cmd.add_option("--eta", eta, "channel transmittivity")->required();
    cmd.add_option("--eps", eps, "channel excess noise");
    cmd.add_option("--beta", beta, "reconciliation efficiency");
    cmd.add_option("--tn", tn, "noise-coupling transmittance of the purification model");
    cmd.add_option("--attack", attack, "individual | collective");
    cmd.add_option("--method", method, "direct | purification | auto");
  }

  ProtocolParams params() const { return {V, dV, T, chi, eta, eps}; }

  optimize::RateModel model() const {
    optimize::RateModel m;
    m.attack = sweep::parse_attack(attack);
    m.method = sweep::parse_method(method);
    m.beta = beta;
    m.tn = tn;
    return m;
  }
};

std::string_view status_text(optimize::ThresholdStatus s) {
  switch (s) {
    case optimize::ThresholdStatus::root: return "root";
    case optimize::ThresholdStatus::insecure: return "insecure";
    case optimize::ThresholdStatus::unbounded: return "unbounded";
    case optimize::ThresholdStatus::feasibility: return "feasibility";
    case optimize::ThresholdStatus::infeasible: return "infeasible";
  }
  return "?";
}

// Writes to --out when given, otherwise to the caller's stream.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_.open(path);
      if (!file_) throw ConfigError("cannot open output file " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Key rates, thresholds and sweeps for CV-QKD with noisy coherent states",
               "cvqkd"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path;
  unsigned jobs = 0;
  app.add_option("--out", out_path, "write results to this file instead of stdout");
  app.add_option("--jobs", jobs, "worker threads (0 = all cores)");

  std::function<int()> action;

  // rate
  ParamFlags rate_flags;
  auto* rate = app.add_subcommand("rate", "key rate at one parameter point");
  rate_flags.add_to(*rate, true);
  rate->callback([&] {
    action = [&] {
      const KeyRateResult r = rate_flags.model().evaluate(rate_flags.params());
      Output o(out_path, out);
      *o << "attack,V,dV,T,chi,eta,eps,beta,i_ab,eve_info,rate\n"
         << to_string(r.attack) << ',' << format_number(r.params.V) << ','
         << format_number(r.params.dV) << ',' << format_number(r.params.T) << ','
         << format_number(r.params.chi) << ',' << format_number(r.params.eta) << ','
         << format_number(r.params.eps) << ',' << format_number(r.beta) << ','
         << format_number(r.i_ab) << ',' << format_number(r.eve_info) << ','
         << format_number(r.rate) << '\n';
      return kExitOk;
    };
  });

  // threshold
  std::string which;
  ParamFlags thr_flags;
  bool thr_purified = false;
  double thr_N = 1.0, thr_snr = 1.0;
  optimize::Tolerances tol;
  auto* thr = app.add_subcommand("threshold", "noise thresholds by bisection");
  thr->add_option("quantity", which, "dv_max | eps_max | eta_min | snr_dv_max")
      ->required()
      ->check(CLI::IsMember({"dv_max", "eps_max", "eta_min", "snr_dv_max"}));
  thr->add_option("--V", thr_flags.V, "source variance");
  thr->add_option("--dV", thr_flags.dV, "preparation noise");
  thr->add_option("--chi", thr_flags.chi, "trusted detection noise");
  thr->add_option("--eta", thr_flags.eta, "channel transmittivity");
  thr->add_option("--eps", thr_flags.eps, "channel excess noise");
  thr->add_option("--beta", thr_flags.beta, "reconciliation efficiency (snr_dv_max)");
  thr->add_option("--snr", thr_snr, "signal-to-noise ratio (snr_dv_max)");
  thr->add_option("--N", thr_N, "eavesdropper EPR variance (eta_min)");
  thr->add_option("--attack", thr_flags.attack, "individual | collective (dv_max)");
  thr->add_option("--tn", thr_flags.tn, "noise-coupling transmittance");
  thr->add_flag("--purified", thr_purified, "optimize T (or fix it by the SNR)");
  thr->add_option("--param-tol", tol.param, "bracket width on the threshold");
  thr->add_option("--rate-tol", tol.rate, "|rate| at a converged root");
  thr->add_option("--cap", tol.probe_cap, "largest value probed before reporting inf");
  thr->callback([&] {
    action = [&] {
      optimize::ThresholdResult r;
      const ParamFlags& f = thr_flags;
      if (which == "dv_max") {
        r = optimize::dv_max(sweep::parse_attack(f.attack), f.V, f.eta, f.eps, f.chi,
                             thr_purified, tol, f.tn);
      } else if (which == "eps_max") {
        r = optimize::eps_max(f.V, f.dV, f.eta, thr_purified, tol, f.tn);
      } else if (which == "eta_min") {
        r = optimize::eta_min_secure(f.V, f.dV, thr_N, thr_purified, tol);
      } else {
        const reconciliation::ReconParams rp{f.beta, thr_snr};
        r = thr_purified ? reconciliation::dv_max_purified(rp, f.V, f.eta, tol)
                         : reconciliation::dv_max_unpurified(rp, f.eta, tol);
      }
      Output o(out_path, out);
      *o << "quantity,value,status,converged,iterations,achieved_rate\n"
         << which << ',' << format_number(r.value) << ',' << status_text(r.status) << ','
         << (r.converged ? 1 : 0) << ',' << r.iterations << ','
         << format_number(r.achieved_rate) << '\n';
      return kExitOk;
    };
  });

  // optimize
  ParamFlags opt_flags;
  auto* opt = app.add_subcommand("optimize", "maximize the key rate over the attenuation T");
  opt_flags.add_to(*opt, false);
  opt->callback([&] {
    action = [&] {
      const optimize::RateModel m = opt_flags.model();
      const optimize::MaximizeResult r = optimize::maximize_rate_over_T(m, opt_flags.params());
      std::string analytic_t;
      if (m.attack == Attack::individual && opt_flags.chi == 0.0) {
        try {
          analytic_t = format_number(
              analytic::t_opt_analytic(opt_flags.V, opt_flags.dV, opt_flags.eta, opt_flags.eps));
        } catch (const NoPurificationGain&) {
        }
      }
      Output o(out_path, out);
      *o << "T_star,rate_star,evaluations,fallback,t_opt_analytic\n"
         << format_number(r.t_star) << ',' << format_number(r.rate_star) << ','
         << r.evaluations << ',' << (r.fallback ? 1 : 0) << ',' << analytic_t << '\n';
      return kExitOk;
    };
  });

  // sweep
  std::string spec_path, quantity, attack, method, purified, beta_table_path;
  std::vector<std::string> fixed_flags, axis_flags;
  std::optional<double> tn_flag, cap_flag;
  bool db_flag = false, dump_spec = false;
  auto* sw = app.add_subcommand("sweep", "evaluate a quantity on a parameter grid");
  sw->add_option("--spec", spec_path, "JSON sweep specification");
  sw->add_option("--quantity", quantity, "quantity to evaluate");
  sw->add_option("--fixed", fixed_flags, "name=value (repeatable)");
  sw->add_option("--axis", axis_flags, "name:min:max:steps[:linear|log] (repeatable)");
  sw->add_option("--attack", attack, "individual | collective");
  sw->add_option("--method", method, "direct | purification | auto");
  sw->add_option("--purified", purified, "false | true | both");
  sw->add_option("--tn", tn_flag, "noise-coupling transmittance");
  sw->add_option("--cap", cap_flag, "add a column with thresholds clipped at this value");
  sw->add_flag("--db", db_flag, "add 10 log10 of thresholds");
  sw->add_option("--beta-table", beta_table_path, "two-column CSV of (snr, beta)");
  sw->add_flag("--dump-spec", dump_spec, "print the resolved spec as JSON and exit");
  sw->callback([&] {
    action = [&] {
      sweep::SweepSpec spec;
      if (!spec_path.empty()) spec = load_spec(spec_path);
      if (!quantity.empty()) spec.quantity = sweep::parse_quantity(quantity);
      for (const auto& f : fixed_flags) {
        const auto [name, value] = parse_assignment(f);
        std::erase_if(spec.axes, [&](const sweep::Axis& a) { return a.name == name; });
        spec.fixed[name] = value;
      }
      for (const auto& a : axis_flags) {
        sweep::Axis axis = parse_axis(a);
        spec.fixed.erase(axis.name);
        auto it = std::ranges::find(spec.axes, axis.name, &sweep::Axis::name);
        if (it != spec.axes.end()) {
          *it = axis;
        } else {
          spec.axes.push_back(axis);
        }
      }
      if (!attack.empty()) spec.attack = sweep::parse_attack(attack);
      if (!method.empty()) spec.method = sweep::parse_method(method);
      if (!purified.empty()) spec.purified = sweep::parse_purified(purified);
      if (tn_flag) spec.tn = *tn_flag;
      if (cap_flag) spec.cap = *cap_flag;
      if (db_flag) spec.db_column = true;
      if (!beta_table_path.empty()) {
        spec.beta_table = reconciliation::BetaTable::from_csv(beta_table_path);
      }
      spec.validate();
      const std::string& path = out_path.empty() ? spec.output : out_path;
      Output o(path, out);
      if (dump_spec) {
        *o << spec_to_json(spec).dump(2) << '\n';
        return kExitOk;
      }
      sweep::write_csv(sweep::run_sweep(spec, jobs), *o);
      return kExitOk;
    };
  });

  // figure
  std::string preset;
  int points = 41;
  bool fig_dump = false;
  auto* fig = app.add_subcommand("figure", "emit the data grid of a figure preset");
  fig->add_option("name", preset, "fig2 | fig3 | fig4 | fig5a | fig5b | fig6 | fig7 | fig8")
      ->required();
  fig->add_option("--points", points, "grid points per axis");
  fig->add_flag("--dump-spec", fig_dump, "print the preset as JSON and exit");
  fig->callback([&] {
    action = [&] {
      const sweep::SweepSpec spec = sweep::figure_preset(preset, points);
      Output o(out_path, out);
      if (fig_dump) {
        *o << spec_to_json(spec).dump(2) << '\n';
      } else {
        sweep::write_csv(sweep::run_sweep(spec, jobs), *o);
      }
      return kExitOk;
    };
  });

  // validate
  std::string suite;
  validate::Options vopt;
  auto* val = app.add_subcommand("validate", "cross-method validation suites");
  val->add_option("suite", suite,
                  "analytic_vs_symplectic | direct_vs_purification | topt | series_fit | "
                  "rms_deviation | all")
      ->required();
  val->add_option("--samples", vopt.samples, "sample count for series_fit and rms_deviation");
  val->add_option("--seed", vopt.seed, "sampler seed");
  val->callback([&] {
    action = [&] {
      vopt.jobs = jobs;
      std::vector<std::string> suites;
      if (suite == "all") {
        suites = validate::suite_names();
      } else {
        suites = {suite};
      }
      Output o(out_path, out);
      bool ok = true;
      for (const auto& s : suites) {
        const validate::Report r = validate::run(s, vopt);
        validate::print(r, *o);
        ok = ok && r.passed();
      }
      return ok ? kExitOk : kExitValidationFailed;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfigError;
  }

  try {
    return action ? action() : kExitConfigError;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
  } catch (const DomainError& e) {
    err << "parameter error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitConfigError;
}

}  // namespace cvqkd::cli
