#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coopgen/model.hpp"

namespace coopgen {

// Every operation here is a pure function of (instance, profile). Profiles are
// taken as real vectors so the same code serves the relaxed problem; the
// StrategyProfile overloads convert.

/// alpha * d^(-beta) - delta. Not clamped: very large d can give negative error.
/// Throws DomainError for d_total < 1.
double local_error(const ScalingLaw& law, double d_total);

/// exp((mean_n eps_n - 1) / varrho) with eps_n evaluated at d_loc + d_gen.
double global_error(const GameInstance& g, std::span<const double> d_gen);

/// Counterfactual gap: global error with d_gen[n] := 0 minus the actual one. Always >= 0.
double marginal_contribution(const GameInstance& g, std::span<const double> d_gen, std::size_t n);
std::vector<double> marginal_contributions(const GameInstance& g, std::span<const double> d_gen);

/// psi_n * (epsilon0 - global_error).
double cooperation_gain(const GameInstance& g, std::span<const double> d_gen, std::size_t n);

/// Magnitude sum_{n'} phi_{n'} * gamma(n, n') * gap_n (non-negative).
double competition_loss(const GameInstance& g, std::span<const double> d_gen, std::size_t n);

/// Magnitude sum_{n'} xi * gamma(n, n') * gap_n (non-negative).
double redistribution_receipts(const GameInstance& g, std::span<const double> d_gen, std::size_t n);

/// cost_per_joule * kappa * (eta * (d_loc + d_gen) + mu * d_gen) * f^2.
double compute_cost(const OrganizationProfile& org, double d_gen);

/// Per-organization decomposition of U_n.
///
/// The competition and redistribution fields carry the signed contribution
/// bracket eps(s) - eps(s with own generation removed), which is <= 0. With
/// that sign the weighted-potential identity holds exactly for
/// z_n = sum gamma (xi - phi) - psi. competition_loss() and
/// redistribution_receipts() above return the corresponding magnitudes.
struct UtilityBreakdown {
  std::size_t org = 0;
  double gain = 0.0;
  double redistribution = 0.0;
  double competition_loss = 0.0;
  double compute_cost = 0.0;
  double server_fee = 0.0;
  double utility = 0.0;
  double contribution_gap = 0.0;

  /// Recomputes gain + redistribution - competition_loss - compute_cost - server_fee.
  double recomputed() const {
    return gain + redistribution - competition_loss - compute_cost - server_fee;
  }
};

UtilityBreakdown utility(const GameInstance& g, std::span<const double> d_gen, std::size_t n);
std::vector<UtilityBreakdown> utilities(const GameInstance& g, std::span<const double> d_gen);

double social_welfare(const GameInstance& g, std::span<const double> d_gen);
double social_welfare(std::span<const UtilityBreakdown> breakdowns);

/// true where U_n >= 0 (boundary passes).
std::vector<bool> check_ir(std::span<const double> utility_values);
std::vector<bool> check_ir(const GameInstance& g, std::span<const double> d_gen);

/// Budget-balanced pairwise netting of the redistribution payments.
struct SettlementLedger {
  std::size_t n = 0;
  std::vector<double> transfers;  // row-major; (i, j) = net amount i receives from j
  std::vector<double> net;        // row sums

  double at(std::size_t i, std::size_t j) const { return transfers[i * n + j]; }
  double total() const;
};

/// t[n][n'] = xi * gamma(n, n') * (gap_n - gap_n'). Requires symmetric gamma.
SettlementLedger settle(const GameInstance& g, std::span<const double> d_gen);

// Integer-profile conveniences.
double global_error(const GameInstance& g, const StrategyProfile& s);
std::vector<UtilityBreakdown> utilities(const GameInstance& g, const StrategyProfile& s);
double social_welfare(const GameInstance& g, const StrategyProfile& s);
SettlementLedger settle(const GameInstance& g, const StrategyProfile& s);

}  // namespace coopgen
