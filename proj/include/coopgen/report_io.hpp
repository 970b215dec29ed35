#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coopgen/equilibrium.hpp"
#include "coopgen/scaling_fit.hpp"
#include "coopgen/simulation.hpp"

namespace coopgen {

/// Shortest round-trip decimal form, locale independent ("." separator).
std::string format_double(double v);

void write_equilibrium_csv(std::ostream& out, const GameInstance& g, const RoundReport& report);

/// Solver diagnostics; the potential trace is included only when asked.
nlohmann::json diagnostics_json(const SolveDiagnostics& d, bool with_trace);

nlohmann::json round_report_json(const RoundReport& r);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_sweep_summary_csv(std::ostream& out, const SweepResult& result);
/// Rows with a flag or an error; header only when there are none.
void write_sweep_flags_csv(std::ostream& out, const SweepResult& result);

// Plot-ready tables, one row per summary cell.
void write_fig_gamma_dgen_csv(std::ostream& out, const SweepResult& result);
void write_fig_xi_welfare_csv(std::ostream& out, const SweepResult& result);
void write_fig_baselines_csv(std::ostream& out, const SweepResult& result);

nlohmann::json laws_json(const std::map<std::string, TaggedFit>& fits);

/// Creates `dir` if needed. Throws ConfigError naming the first of `files`
/// that already exists unless `force` is set.
void prepare_output_dir(const std::filesystem::path& dir, const std::vector<std::string>& files, bool force);

/// Writes `content` with "\n" line endings in binary mode.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace coopgen
