#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coopgen/equilibrium.hpp"
#include "coopgen/model.hpp"
#include "coopgen/simulation.hpp"

namespace coopgen {

/// Parsed configuration file. Exactly one of `organizations` / `sampling` is set.
struct Config {
  std::optional<std::vector<OrganizationProfile>> organizations;
  std::optional<SamplingSpec> sampling;
  std::size_t n_orgs = 10;  // sampling only

  std::optional<CompetitionMatrix> matrix;
  std::optional<std::string> regime;
  std::optional<Range> gamma_range;

  std::optional<double> xi;
  MechanismParams mech;  // xi filled from `xi` when present
  SolverSettings solver;

  std::optional<SweepSpec> sweep;
};

/// Strict parse: unknown keys and type mismatches throw ConfigError with a
/// JSON-pointer path to the offending field.
Config parse_config(const nlohmann::json& doc);
Config parse_config_text(const std::string& text);
Config load_config(const std::filesystem::path& path);

/// Materializes the game. `seed_override` replaces sampling.seed.
GameInstance build_instance(const Config& cfg, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Sweep spec with sampling ranges, mechanism and solver settings folded in.
SweepSpec build_sweep(const Config& cfg, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Explicit-form config (organizations + matrix) that re-parses to `g`.
nlohmann::json effective_config(const GameInstance& g, const SolverSettings& solver);

}  // namespace coopgen
