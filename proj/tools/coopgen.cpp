// coopgen: command-line front end. Exit codes: 0 ok, 1 config/validation
// error, 2 solver non-convergence, 3 every sweep cell failed.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coopgen/config.hpp"
#include "coopgen/errors.hpp"
#include "coopgen/report_io.hpp"
#include "coopgen/scaling_fit.hpp"
#include "coopgen/simulation.hpp"

namespace fs = std::filesystem;
using namespace coopgen;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNotConverged = 2;
constexpr int kSweepFailed = 3;

struct Common {
  std::string config;
  std::string output = ".";
  std::optional<std::uint64_t> seed;
  bool force = false;
};

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

// Every violation, the xi <= phi bound included, is a hard error here.
GameInstance checked_instance(const Config& cfg, std::optional<std::uint64_t> seed) {
  auto g = build_instance(cfg, seed);
  const auto violations = validate_instance(g);
  if (!violations.empty()) throw ConfigError("invalid instance: " + describe(violations));
  return g;
}

int cmd_validate(const Common& c) {
  const auto cfg = load_config(c.config);
  if (cfg.sweep) {
    check_sweep_spec(build_sweep(cfg, c.seed));
    std::cout << "ok: sweep spec is valid\n";
    if (!cfg.xi) return kOk;
  }
  const auto g = checked_instance(cfg, c.seed);
  std::cout << "ok: " << g.size() << " organizations, xi = " << format_double(g.mech.xi) << "\n";
  return kOk;
}

int cmd_solve(const Common& c, bool diagnostics, bool dump_config) {
  const auto cfg = load_config(c.config);
  const auto g = checked_instance(cfg, c.seed);
  std::vector<std::string> files{"equilibrium.csv", "diagnostics.json"};
  if (dump_config) files.push_back("effective_config.json");
  prepare_output_dir(c.output, files, c.force);

  const auto report = run_round(g, Method::CoCoGen, c.seed.value_or(0), cfg.solver);
  const fs::path dir = c.output;
  write_text_file(dir / "equilibrium.csv", render([&](auto& o) { write_equilibrium_csv(o, g, report); }));
  write_text_file(dir / "diagnostics.json", dump(diagnostics_json(*report.diagnostics, diagnostics)));
  if (dump_config) write_text_file(dir / "effective_config.json", dump(effective_config(g, cfg.solver)));

  std::size_t ir_fail = 0;
  for (const auto& b : report.breakdowns) ir_fail += b.utility < 0.0;
  std::cout << "welfare=" << format_double(report.welfare) << " global_error=" << format_double(report.global_err)
            << " iterations=" << report.diagnostics->iterations
            << " converged=" << (report.converged ? "true" : "false") << " ir_violations=" << ir_fail << "\n";
  return report.converged ? kOk : kNotConverged;
}

int cmd_sweep(const Common& c, unsigned threads, bool dump_reports) {
  const auto cfg = load_config(c.config);
  auto spec = build_sweep(cfg, c.seed);
  if (threads) spec.threads = threads;
  spec.keep_reports = dump_reports;
  check_sweep_spec(spec);

  std::vector<std::string> files{"sweep.csv",          "sweep_summary.csv",  "sweep_flags.csv",
                                 "fig_gamma_dgen.csv", "fig_xi_welfare.csv", "fig_baselines.csv"};
  if (dump_reports) files.push_back("reports.json");
  prepare_output_dir(c.output, files, c.force);

  const auto result = run_sweep(spec);
  const fs::path dir = c.output;
  write_text_file(dir / "sweep.csv", render([&](auto& o) { write_sweep_csv(o, result); }));
  write_text_file(dir / "sweep_summary.csv", render([&](auto& o) { write_sweep_summary_csv(o, result); }));
  write_text_file(dir / "sweep_flags.csv", render([&](auto& o) { write_sweep_flags_csv(o, result); }));
  write_text_file(dir / "fig_gamma_dgen.csv", render([&](auto& o) { write_fig_gamma_dgen_csv(o, result); }));
  write_text_file(dir / "fig_xi_welfare.csv", render([&](auto& o) { write_fig_xi_welfare_csv(o, result); }));
  write_text_file(dir / "fig_baselines.csv", render([&](auto& o) { write_fig_baselines_csv(o, result); }));
  if (dump_reports) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& row : result.rows) {
      nlohmann::json rounds = nlohmann::json::array();
      for (const auto& r : row.reports) rounds.push_back(round_report_json(r));
      cells.push_back({{"regime", row.regime}, {"preset", row.preset}, {"xi", row.xi},
                       {"method", to_string(row.method)}, {"seed", row.seed}, {"ok", row.ok},
                       {"error", row.error}, {"rounds", rounds}});
    }
    write_text_file(dir / "reports.json", dump(cells));
  }

  const auto ok = result.succeeded();
  std::cout << "cells=" << result.rows.size() << " succeeded=" << ok << " failed=" << result.rows.size() - ok
            << "\n";
  if (ok == 0) {
    std::cerr << "error: every sweep cell failed; first error: " << result.rows.front().error << "\n";
    return kSweepFailed;
  }
  return kOk;
}

int cmd_fit(const Common& c) {
  std::ifstream in(c.config, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + c.config + "'");
  std::map<std::string, std::vector<LossObservation>> groups;
  try {
    groups = read_loss_csv(in);
  } catch (const ConfigError& e) {
    throw ConfigError(c.config + ": " + e.what());
  }
  if (groups.empty()) throw ConfigError(c.config + ": no observations");
  prepare_output_dir(c.output, {"laws.json"}, c.force);

  const auto fits = fit_by_tag(groups);
  write_text_file(fs::path(c.output) / "laws.json", dump(laws_json(fits)));
  bool any_ok = false;
  for (const auto& [tag, fit] : fits) {
    if (const auto* r = std::get_if<FitResult>(&fit)) {
      any_ok = true;
      std::cout << tag << ": r2=" << format_double(r->r2) << " alpha=" << format_double(r->law.alpha)
                << " beta=" << format_double(r->law.beta) << " delta=" << format_double(r->law.delta) << "\n";
    } else {
      std::cout << tag << ": failed: " << std::get<std::string>(fit) << "\n";
    }
  }
  return any_ok ? kOk : kConfigError;
}

int cmd_simulate(const Common& c, const std::string& method_name, int rounds) {
  const auto method = parse_method(method_name);
  if (!method) throw ConfigError("unknown method '" + method_name + "'");
  if (rounds < 1) throw ConfigError("--rounds must be at least 1");
  const auto cfg = load_config(c.config);
  const auto g = checked_instance(cfg, c.seed);
  prepare_output_dir(c.output, {"rounds.json", "rounds.csv"}, c.force);

  const std::uint64_t seed = c.seed.value_or(cfg.sampling ? cfg.sampling->seed : 1);
  const auto reports = run_rounds(g, *method, seed, rounds, cfg.solver);
  nlohmann::json all = nlohmann::json::array();
  std::string csv = "round,method,welfare,global_error,mean_dgen,converged\n";
  double total = 0.0;
  bool converged = true;
  for (const auto& r : reports) {
    all.push_back(round_report_json(r));
    double sum = 0.0;
    for (auto d : r.strategy.d_gen) sum += static_cast<double>(d);
    csv += std::to_string(r.round) + ',' + to_string(r.method) + ',' + format_double(r.welfare) + ',' +
           format_double(r.global_err) + ',' + format_double(sum / static_cast<double>(g.size())) + ',' +
           (r.converged ? "true" : "false") + '\n';
    total += r.welfare;
    converged = converged && r.converged;
  }
  const fs::path dir = c.output;
  write_text_file(dir / "rounds.json", dump(all));
  write_text_file(dir / "rounds.csv", csv);
  std::cout << "method=" << to_string(*method) << " rounds=" << rounds << " total_welfare=" << format_double(total)
            << "\n";
  return converged ? kOk : kNotConverged;
}

void add_common(CLI::App* sub, Common& c, const char* input_help) {
  sub->add_option("input", c.config, input_help)->required();
  sub->add_option("-o,--output", c.output, "Output directory (created if absent)");
  sub->add_option("--seed", c.seed, "Override the sampling seed");
  sub->add_flag("--force", c.force, "Overwrite existing output files");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium engine for synthetic-data generation in cross-silo federated learning"};
  app.require_subcommand(1);

  Common common;
  bool diagnostics = false, dump_config = false, dump_reports = false;
  unsigned threads = 0;
  std::string method = "cocogen";
  int rounds = 1;

  auto* validate = app.add_subcommand("validate", "Parse and validate a configuration");
  validate->add_option("input", common.config, "Config JSON")->required();
  validate->add_option("--seed", common.seed, "Override the sampling seed");

  auto* solve = app.add_subcommand("solve", "Compute the equilibrium of one instance");
  add_common(solve, common, "Config JSON");
  solve->add_flag("--diagnostics", diagnostics, "Include the potential trace in diagnostics.json");
  solve->add_flag("--dump-effective-config", dump_config, "Write the fully explicit config");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  add_common(sweep, common, "Config JSON with a sweep section");
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep->add_flag("--dump-reports", dump_reports, "Write every round report to reports.json");

  auto* fit = app.add_subcommand("fit", "Fit power-law scaling laws to loss observations");
  add_common(fit, common, "CSV with header d_total,loss[,tag]");

  auto* simulate = app.add_subcommand("simulate", "Run rounds of one method on one instance");
  add_common(simulate, common, "Config JSON");
  simulate->add_option("--method", method, "cocogen, vcfl, wco, wdg, radg or madg");
  simulate->add_option("--rounds", rounds, "Number of rounds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*validate) return cmd_validate(common);
    if (*solve) return cmd_solve(common, diagnostics, dump_config);
    if (*sweep) return cmd_sweep(common, threads, dump_reports);
    if (*fit) return cmd_fit(common);
    if (*simulate) return cmd_simulate(common, method, rounds);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
