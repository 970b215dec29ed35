#include "coopgen/economics.hpp"

#include <cmath>
#include <string>

#include "coopgen/errors.hpp"

namespace coopgen {

namespace {

void check_profile(const GameInstance& g, std::span<const double> d_gen) {
  if (d_gen.size() != g.orgs.size()) {
    throw PreconditionError("profile has " + std::to_string(d_gen.size()) + " entries for " +
                            std::to_string(g.orgs.size()) + " organizations");
  }
}

void check_index(const GameInstance& g, std::size_t n) {
  if (n >= g.orgs.size()) throw PreconditionError("organization index out of range");
}

double mean_local_error(const GameInstance& g, std::span<const double> d_gen) {
  double sum = 0.0;
  for (std::size_t n = 0; n < g.orgs.size(); ++n)
    sum += local_error(g.orgs[n].law, static_cast<double>(g.orgs[n].d_loc) + d_gen[n]);
  return sum / static_cast<double>(g.orgs.size());
}

double error_from_mean(const GameInstance& g, double mean_eps) {
  return std::exp((mean_eps - 1.0) / g.mech.varrho);
}

// Sum over rivals of weight(n') * gamma(n, n').
template <typename Weight>
double rivalry_sum(const GameInstance& g, std::size_t n, Weight weight) {
  double sum = 0.0;
  for (std::size_t m = 0; m < g.orgs.size(); ++m)
    if (m != n) sum += weight(m) * g.comp(n, m);
  return sum;
}

}  // namespace

double local_error(const ScalingLaw& law, double d_total) {
  if (!(d_total >= 1.0)) {
    throw DomainError("local error is undefined for a training-set size of " +
                      std::to_string(d_total) + " (need at least 1 sample)");
  }
  return law.alpha * std::pow(d_total, -law.beta) - law.delta;
}

double global_error(const GameInstance& g, std::span<const double> d_gen) {
  check_profile(g, d_gen);
  return error_from_mean(g, mean_local_error(g, d_gen));
}

double marginal_contribution(const GameInstance& g, std::span<const double> d_gen, std::size_t n) {
  check_profile(g, d_gen);
  check_index(g, n);
  if (d_gen[n] == 0.0) return 0.0;
  std::vector<double> counterfactual(d_gen.begin(), d_gen.end());
  counterfactual[n] = 0.0;
  return global_error(g, counterfactual) - global_error(g, d_gen);
}

std::vector<double> marginal_contributions(const GameInstance& g, std::span<const double> d_gen) {
  check_profile(g, d_gen);
  const std::size_t size = g.orgs.size();
  std::vector<double> eps(size);
  double sum = 0.0;
  for (std::size_t n = 0; n < size; ++n) {
    eps[n] = local_error(g.orgs[n].law, static_cast<double>(g.orgs[n].d_loc) + d_gen[n]);
    sum += eps[n];
  }
  const double actual = error_from_mean(g, sum / static_cast<double>(size));
  std::vector<double> gaps(size, 0.0);
  for (std::size_t n = 0; n < size; ++n) {
    if (d_gen[n] == 0.0) continue;
    // Same summation order as global_error() on the counterfactual profile.
    double cf_sum = 0.0;
    for (std::size_t m = 0; m < size; ++m) {
      cf_sum += m == n ? local_error(g.orgs[m].law, static_cast<double>(g.orgs[m].d_loc)) : eps[m];
    }
    gaps[n] = error_from_mean(g, cf_sum / static_cast<double>(size)) - actual;
  }
  return gaps;
}

double cooperation_gain(const GameInstance& g, std::span<const double> d_gen, std::size_t n) {
  check_index(g, n);
  return g.orgs[n].psi * (g.mech.epsilon0 - global_error(g, d_gen));
}

double competition_loss(const GameInstance& g, std::span<const double> d_gen, std::size_t n) {
  const double gap = marginal_contribution(g, d_gen, n);
  return rivalry_sum(g, n, [&](std::size_t m) { return g.orgs[m].phi; }) * gap;
}

double redistribution_receipts(const GameInstance& g, std::span<const double> d_gen, std::size_t n) {
  const double gap = marginal_contribution(g, d_gen, n);
  return rivalry_sum(g, n, [&](std::size_t) { return g.mech.xi; }) * gap;
}

double compute_cost(const OrganizationProfile& org, double d_gen) {
  if (!(d_gen >= 0.0)) throw PreconditionError("d_gen must be non-negative");
  const double energy = org.kappa *
                        (org.eta * (static_cast<double>(org.d_loc) + d_gen) + org.mu * d_gen) *
                        org.freq * org.freq;
  return org.cost_per_joule * energy;
}

namespace {

UtilityBreakdown assemble(const GameInstance& g, std::span<const double> d_gen, std::size_t n,
                          double global_err, double gap) {
  const auto& org = g.orgs[n];
  UtilityBreakdown b;
  b.org = n;
  b.contribution_gap = gap;
  b.gain = org.psi * (g.mech.epsilon0 - global_err);
  // Signed bracket: eps(s) - eps(s without n's generation) = -gap.
  b.redistribution = -(rivalry_sum(g, n, [&](std::size_t) { return g.mech.xi; }) * gap);
  b.competition_loss = -(rivalry_sum(g, n, [&](std::size_t m) { return g.orgs[m].phi; }) * gap);
  b.compute_cost = compute_cost(org, d_gen[n]);
  b.server_fee = g.mech.c0;
  b.utility = b.gain + b.redistribution - b.competition_loss - b.compute_cost - b.server_fee;
  return b;
}

}  // namespace

UtilityBreakdown utility(const GameInstance& g, std::span<const double> d_gen, std::size_t n) {
  check_profile(g, d_gen);
  check_index(g, n);
  return assemble(g, d_gen, n, global_error(g, d_gen), marginal_contribution(g, d_gen, n));
}

std::vector<UtilityBreakdown> utilities(const GameInstance& g, std::span<const double> d_gen) {
  check_profile(g, d_gen);
  const double err = global_error(g, d_gen);
  const auto gaps = marginal_contributions(g, d_gen);
  std::vector<UtilityBreakdown> out;
  out.reserve(g.orgs.size());
  for (std::size_t n = 0; n < g.orgs.size(); ++n) out.push_back(assemble(g, d_gen, n, err, gaps[n]));
  return out;
}

double social_welfare(std::span<const UtilityBreakdown> breakdowns) {
  double sum = 0.0;
  for (const auto& b : breakdowns) sum += b.utility;
  return sum;
}

double social_welfare(const GameInstance& g, std::span<const double> d_gen) {
  return social_welfare(utilities(g, d_gen));
}

std::vector<bool> check_ir(std::span<const double> utility_values) {
  std::vector<bool> pass;
  pass.reserve(utility_values.size());
  for (double u : utility_values) pass.push_back(u >= 0.0);
  return pass;
}

std::vector<bool> check_ir(const GameInstance& g, std::span<const double> d_gen) {
  std::vector<double> values;
  for (const auto& b : utilities(g, d_gen)) values.push_back(b.utility);
  return check_ir(values);
}

double SettlementLedger::total() const {
  double sum = 0.0;
  for (double v : net) sum += v;
  return sum;
}

SettlementLedger settle(const GameInstance& g, std::span<const double> d_gen) {
  if (!g.comp.is_symmetric()) {
    throw PreconditionError("settlement requires a symmetric competition matrix");
  }
  const auto gaps = marginal_contributions(g, d_gen);
  const std::size_t size = g.orgs.size();
  SettlementLedger ledger;
  ledger.n = size;
  ledger.transfers.assign(size * size, 0.0);
  ledger.net.assign(size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = i + 1; j < size; ++j) {
      const double t = g.mech.xi * g.comp(i, j) * (gaps[i] - gaps[j]);
      ledger.transfers[i * size + j] = t;
      ledger.transfers[j * size + i] = -t;
    }
  }
  for (std::size_t i = 0; i < size; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < size; ++j) row += ledger.transfers[i * size + j];
    ledger.net[i] = row;
  }
  return ledger;
}

double global_error(const GameInstance& g, const StrategyProfile& s) {
  return global_error(g, s.as_real());
}

std::vector<UtilityBreakdown> utilities(const GameInstance& g, const StrategyProfile& s) {
  return utilities(g, s.as_real());
}

double social_welfare(const GameInstance& g, const StrategyProfile& s) {
  return social_welfare(g, s.as_real());
}

SettlementLedger settle(const GameInstance& g, const StrategyProfile& s) {
  return settle(g, s.as_real());
}

}  // namespace coopgen
