#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coopgen/model.hpp"

namespace coopgen {

enum class StopRule { PotentialChange, IterateChange };

struct SolverSettings {
  double eps_tol = 1e-8;         // on successive potential change
  int k_max = 1000;
  std::int64_t oracle_grid_step = 1;
  StopRule stop_rule = StopRule::PotentialChange;
  double iterate_tol = 1e-6;     // samples, infinity norm; IterateChange only

  bool operator==(const SolverSettings&) const = default;
};

/// KKT scenario of one coordinate of the relaxed potential minimization.
enum class BoundCase { LowerBound, UpperBound, Interior };

const char* to_string(BoundCase c);
const char* to_string(StopRule r);

struct SolveDiagnostics {
  int iterations = 0;
  int polish_iterations = 0;            // extra sweeps after the stop rule fired
  bool converged = false;
  std::vector<BoundCase> case_labels;
  std::vector<double> potential_trace;  // F at the start and after every iteration
  std::vector<double> continuous_solution;
  std::vector<double> gradients;        // dF/dd_n at the continuous solution
  std::vector<double> foc_residuals;    // gradient for interior orgs, 0 for bound cases
  std::vector<bool> ir_pass;
  double budget_residual = 0.0;         // sum of settlement nets
  std::vector<std::string> violations;  // post-hoc findings, never fatal

  bool operator==(const SolveDiagnostics&) const = default;
};

struct SolveResult {
  StrategyProfile profile;
  SolveDiagnostics diagnostics;
};

/// z_n = sum_{n' != n} gamma(n, n') (xi - phi_{n'}) - psi_n.
double weight_z(const GameInstance& g, std::size_t n);

/// F = global_error - sum_n kappa_n C_n (eta_n + mu_n) d_n f_n^2 / z_n.
/// Throws InstanceError if some z_n >= 0.
double potential(const GameInstance& g, std::span<const double> d_gen);
double potential(const GameInstance& g, const StrategyProfile& s);

/// F(s) - F(s_dev) - (U_n(s) - U_n(s_dev)) / z_n. Zero up to rounding for a
/// weighted potential game. s and s_dev may differ only at index n.
double check_potential_identity(const GameInstance& g, const StrategyProfile& s,
                                const StrategyProfile& s_dev, std::size_t n);
double check_potential_identity(const GameInstance& g, std::span<const double> s,
                                std::span<const double> s_dev, std::size_t n);

/// Analytic dF/dd_n.
double potential_gradient(const GameInstance& g, std::span<const double> d_gen, std::size_t n);

enum class HessianStatus { PositiveDefinite, NotPositiveDefinite, NumericalBreakdown };

const char* to_string(HessianStatus s);

struct HessianCheck {
  HessianStatus status = HessianStatus::NumericalBreakdown;
  std::size_t n = 0;
  std::vector<double> matrix;  // row-major
  double min_eigenvalue = 0.0;
  std::string detail;

  double at(std::size_t i, std::size_t j) const { return matrix[i * n + j]; }
  double quadratic_form(std::span<const double> zeta) const;
};

/// Assembles the Hessian of F (rank-one plus positive diagonal, both scaled by
/// the shared exponential) and certifies it with a Cholesky factorization.
HessianCheck hessian_pd_check(const GameInstance& g, std::span<const double> d_gen);

/// Sign test of dF/dd_n at d_min and d_max with the other coordinates held.
BoundCase classify_case(const GameInstance& g, std::span<const double> d_gen, std::size_t n);

/// Jacobi fixed-point operator on totals u_n = d_loc + d_gen.
std::vector<double> fpi_update(const GameInstance& g, std::span<const double> u);

/// Fixed-point iteration with case classification, then nearest-neighbour
/// rounding. Non-convergence is reported through diagnostics.converged.
SolveResult solve(const GameInstance& g, const SolverSettings& settings = {});

/// Exhaustive minimizer of F over {d_min, d_min + step, ...} per organization.
/// Ties go to the lexicographically smallest profile.
StrategyProfile brute_force_oracle(const GameInstance& g, std::int64_t grid_step);

/// Number of grid points brute_force_oracle() would visit.
double oracle_grid_size(const GameInstance& g, std::int64_t grid_step);

}  // namespace coopgen
