#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coopgen/economics.hpp"
#include "coopgen/equilibrium.hpp"
#include "coopgen/model.hpp"

namespace coopgen {

/// cocogen: equilibrium strategies. Baselines:
///   vcfl  no generation, no competition
///   wco   equilibrium with competition removed
///   wdg   no generation, competition kept
///   radg  uniform random integers on [d_min, d_max]
///   madg  everyone generates d_max
enum class Method { CoCoGen, Vcfl, Wco, Wdg, Radg, Madg };

const char* to_string(Method m);
std::optional<Method> parse_method(std::string_view name);
const std::vector<Method>& all_methods();

struct RoundReport {
  int round = 1;
  Method method = Method::CoCoGen;
  bool competition_removed = false;  // evaluated on the gamma = 0 copy (vcfl, wco)
  StrategyProfile strategy;
  std::vector<UtilityBreakdown> breakdowns;
  SettlementLedger ledger;
  double welfare = 0.0;
  double global_err = 0.0;
  bool converged = true;
  std::optional<SolveDiagnostics> diagnostics;  // equilibrium methods only
};

/// One round of the workflow with strategies chosen by `method`.
/// Deterministic in (g, method, seed); solver non-convergence is reported in
/// the report rather than thrown.
RoundReport run_round(const GameInstance& g, Method method, std::uint64_t seed,
                      const SolverSettings& settings = {}, int round = 1);

/// Rounds 1..T. Rounds share no state; radg draws a fresh profile per round.
std::vector<RoundReport> run_rounds(const GameInstance& g, Method method, std::uint64_t seed,
                                    int rounds, const SolverSettings& settings = {});

RoundReport run_baseline_wco(const GameInstance& g, const SolverSettings& settings = {});
RoundReport run_baseline_wdg(const GameInstance& g);

struct SweepSpec {
  std::vector<std::string> gamma_regimes{"low", "moderate", "high"};
  std::vector<std::string> presets{"complex@0.1", "complex@0.5", "complex@0.9"};
  std::vector<double> xi_grid{90.0};
  std::vector<Method> methods{Method::CoCoGen};
  std::vector<std::uint64_t> seeds{1};
  int rounds = 1;
  std::size_t n_orgs = 10;
  SamplingSpec sampling;    // seed, gamma range and law are overridden per cell
  MechanismParams mech;     // xi is overridden per cell
  SolverSettings solver;
  unsigned threads = 0;     // 0 = hardware concurrency
  bool keep_reports = false;
};

struct SweepRow {
  std::string regime;
  std::string preset;
  double xi = 0.0;
  Method method = Method::CoCoGen;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::string flags;          // e.g. "xi_exceeds_phi" at this xi
  double welfare = 0.0;       // summed over rounds
  double mean_dgen = 0.0;
  double min_utility = 0.0;
  int ir_violations = 0;
  bool converged = false;
  std::vector<RoundReport> reports;  // only with keep_reports
};

struct SweepSummary {
  std::string regime;
  std::string preset;
  double xi = 0.0;
  Method method = Method::CoCoGen;
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  double mean_welfare = 0.0;
  double min_welfare = 0.0;
  double max_welfare = 0.0;
  double mean_dgen = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // regime, preset, xi, method, seed order
  std::vector<SweepSummary> summary;

  std::size_t succeeded() const;
};

/// Throws PreconditionError for an invalid spec; per-cell failures land in rows.
void check_sweep_spec(const SweepSpec& spec);
SweepResult run_sweep(const SweepSpec& spec);

}  // namespace coopgen
