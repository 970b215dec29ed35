#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coopgen {

/// Power-law surrogate for local error: alpha * d^(-beta) - delta.
struct ScalingLaw {
  double alpha = 1.0;
  double beta = 0.3;
  double delta = 0.0;

  bool operator==(const ScalingLaw&) const = default;
};

/// One silo. Frequency is stored in Hz.
struct OrganizationProfile {
  std::int64_t d_loc = 0;
  double freq = 1e9;
  double kappa = 1e-28;
  double eta = 3e6;
  double mu = 3e6;
  double cost_per_joule = 0.0;
  double psi = 0.0;
  double phi = 0.0;
  ScalingLaw law;

  bool operator==(const OrganizationProfile&) const = default;
};

/// Dense N x N matrix of pairwise competitive intensities.
class CompetitionMatrix {
 public:
  CompetitionMatrix() = default;
  explicit CompetitionMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}
  explicit CompetitionMatrix(const std::vector<std::vector<double>>& rows);

  static CompetitionMatrix zeros(std::size_t n) { return CompetitionMatrix(n); }

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }

  /// Sets (i, j) and (j, i) together.
  void set_pair(std::size_t i, std::size_t j, double v) {
    (*this)(i, j) = v;
    (*this)(j, i) = v;
  }

  bool is_symmetric() const;
  double mean_off_diagonal() const;
  std::vector<std::vector<double>> rows() const;

  bool operator==(const CompetitionMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

struct MechanismParams {
  double xi = 90.0;
  double epsilon0 = 1.0;
  double varrho = 6.0;
  double c0 = 1.0;
  std::int64_t d_min = 0;
  std::int64_t d_max = 6000;

  bool operator==(const MechanismParams&) const = default;
};

struct GameInstance {
  std::vector<OrganizationProfile> orgs;
  CompetitionMatrix comp;
  MechanismParams mech;

  std::size_t size() const { return orgs.size(); }

  /// Copy with every competitive intensity set to zero.
  GameInstance without_competition() const;
  GameInstance with_xi(double xi) const;

  bool operator==(const GameInstance&) const = default;
};

/// Integer synthetic-sample counts, one per organization.
struct StrategyProfile {
  std::vector<std::int64_t> d_gen;

  std::size_t size() const { return d_gen.size(); }
  std::vector<double> as_real() const { return {d_gen.begin(), d_gen.end()}; }

  static StrategyProfile uniform(std::size_t n, std::int64_t value) {
    return {std::vector<std::int64_t>(n, value)};
  }

  bool operator==(const StrategyProfile&) const = default;
};

struct Violation {
  std::string code;
  std::string message;
  std::optional<std::size_t> org;
};

/// Checks every type invariant plus xi <= min phi and z_n < 0.
std::vector<Violation> validate_instance(const GameInstance& g);

std::string describe(std::span<const Violation> violations);

// ---------------------------------------------------------------------------
// Sampling

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Range&) const = default;
};

/// Named competition regimes: "low" U(0,0.2), "moderate" U(0,1), "high" U(0.8,1).
std::optional<Range> gamma_regime(std::string_view name);

struct SamplingSpec {
  std::uint64_t seed = 1;
  Range d_loc{10, 3000};
  Range freq_ghz{1, 5};
  Range psi{400, 600};
  Range phi{200, 400};
  Range cost_per_joule{0.2, 0.6};
  Range gamma{0, 1};
  double kappa = 1e-28;
  double eta = 3e6;
  double mu = 3e6;
  ScalingLaw law{1.2, 0.27, 0.03};

  bool operator==(const SamplingSpec&) const = default;
};

inline constexpr int kSamplingRetries = 100;

/// Draws an n-organization instance; retries up to kSamplingRetries times
/// until validate_instance passes. Throws Error naming the last failing
/// constraint on exhaustion.
GameInstance sample_instance(const SamplingSpec& spec, std::size_t n, const MechanismParams& mech);

// ---------------------------------------------------------------------------
// Scaling-law presets

struct NamedLaw {
  std::string name;
  ScalingLaw law;
};

/// Synthetic calibration placeholders named "<task>@<alpha_D>".
const std::vector<NamedLaw>& scaling_presets();
std::optional<ScalingLaw> find_preset(std::string_view name);

}  // namespace coopgen
