#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "coopgen/economics.hpp"
#include "coopgen/equilibrium.hpp"
#include "coopgen/errors.hpp"
#include "support.hpp"

using namespace coopgen;
using coopgen::testing::random_profile;
using coopgen::testing::rel_diff;
using coopgen::testing::sampled;
using coopgen::testing::three_org_instance;

namespace {

double cost_weight(const OrganizationProfile& o) {
  return o.cost_per_joule * o.kappa * (o.eta + o.mu) * o.freq * o.freq;
}

// F written out from its definition, independent of potential().
double potential_by_hand(const GameInstance& g, const std::vector<double>& d) {
  double f = global_error(g, d);
  for (std::size_t n = 0; n < g.size(); ++n) f -= cost_weight(g.orgs[n]) * d[n] / weight_z(g, n);
  return f;
}

GameInstance identical_orgs(std::size_t n) {
  auto g = sampled(2, n);
  for (auto& o : g.orgs) o = g.orgs[0];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.comp.set_pair(i, j, 0.4);
  return g;
}

}  // namespace

TEST(WeightZ, Examples) {
  GameInstance g;
  g.orgs.resize(3);
  for (auto& o : g.orgs) {
    o.psi = 500;
    o.phi = 300;
  }
  g.comp = CompetitionMatrix(3);
  g.comp.set_pair(0, 1, 0.5);
  g.comp.set_pair(0, 2, 0.5);
  g.comp.set_pair(1, 2, 0.5);
  g.mech.xi = 90;
  EXPECT_DOUBLE_EQ(weight_z(g, 0), -710.0);
  EXPECT_DOUBLE_EQ(weight_z(g.without_competition(), 0), -500.0);
}

TEST(Potential, MatchesDefinition) {
  const auto g = three_org_instance();
  const std::vector<double> zero{0, 0, 0};
  EXPECT_DOUBLE_EQ(potential(g, zero), global_error(g, zero));

  const std::vector<double> d{450, 800, 120};
  EXPECT_LT(rel_diff(potential(g, d), potential_by_hand(g, d)), 1e-14);
  auto doubled = d;
  doubled[1] *= 2;
  EXPECT_LT(rel_diff(potential(g, doubled) - potential(g, d),
                     potential_by_hand(g, doubled) - potential_by_hand(g, d)),
            1e-9);
  // Cost terms enter with a positive sign because z_n < 0.
  EXPECT_GT(potential(g, d), global_error(g, d));
}

TEST(Potential, IdentityHoldsOnRandomDeviations) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = sampled(1000 + static_cast<std::uint64_t>(trial));
    const auto s = random_profile(rng, g);
    auto dev = s;
    const auto n = static_cast<std::size_t>(rng.uniform_int(0, 9));
    dev[n] = static_cast<double>(rng.uniform_int(g.mech.d_min, g.mech.d_max));
    const double scale = std::abs(potential(g, s) - potential(g, dev)) + 1e-12;
    EXPECT_LE(std::abs(check_potential_identity(g, s, dev, n)) / scale, 1e-9);
  }
}

TEST(Potential, IdentityAtBoundsAndSelf) {
  const auto g = sampled(17);
  Rng rng(1);
  auto s = random_profile(rng, g);
  EXPECT_EQ(check_potential_identity(g, s, s, 3), 0.0);
  s[3] = static_cast<double>(g.mech.d_max);
  auto dev = s;
  dev[3] = static_cast<double>(g.mech.d_min);
  const double scale = std::abs(potential(g, s) - potential(g, dev));
  EXPECT_LE(std::abs(check_potential_identity(g, s, dev, 3)) / scale, 1e-9);
}

TEST(Potential, IdentityRejectsMultiCoordinateDeviation) {
  const auto g = three_org_instance();
  EXPECT_THROW(check_potential_identity(g, std::vector<double>{1, 2, 3}, std::vector<double>{2, 3, 3}, 0),
               PreconditionError);
}

TEST(Gradient, ExtendedPotentialAgreesWithPotential) {
  const auto g = three_org_instance();
  const std::vector<double> d{450, 800, 120};
  EXPECT_LT(rel_diff(static_cast<double>(coopgen::testing::potential_extended(g, d)), potential(g, d)), 1e-14);
}

TEST(Gradient, CentralDifferences) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = sampled(300 + static_cast<std::uint64_t>(trial));
    std::vector<double> d(g.size());
    for (auto& x : d) x = rng.uniform(10.0, 5990.0);
    const auto n = static_cast<std::size_t>(rng.uniform_int(0, 9));
    const double fd = coopgen::testing::central_difference(g, d, n);
    EXPECT_LT(rel_diff(potential_gradient(g, d, n), fd), 1e-6);
  }
}

TEST(Gradient, FreeGenerationAlwaysHelps) {
  auto g = sampled(5);
  for (auto& o : g.orgs) o.cost_per_joule = 0.0;
  Rng rng(2);
  const auto d = random_profile(rng, g);
  for (std::size_t n = 0; n < g.size(); ++n) EXPECT_LT(potential_gradient(g, d, n), 0.0);
}

TEST(Hessian, CertifiedOnRandomProfiles) {
  Rng rng(8);
  for (std::size_t n : {2u, 10u}) {
    const auto g = sampled(40 + n, n);
    const auto d = random_profile(rng, g);
    const auto h = hessian_pd_check(g, d);
    EXPECT_EQ(h.status, HessianStatus::PositiveDefinite) << h.detail;
    EXPECT_GT(h.min_eigenvalue, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(h.at(i, j), h.at(j, i));
    for (int k = 0; k < 100; ++k) {
      std::vector<double> zeta(n);
      for (auto& z : zeta) z = rng.uniform(-1.0, 1.0);
      EXPECT_GT(h.quadratic_form(zeta), 0.0);
    }
  }
}

TEST(Hessian, SteepLawsStayPositiveDefinite) {
  auto g = sampled(3, 4);
  for (auto& o : g.orgs) o.law = {5.0, 3.0, 0.0};
  const std::vector<double> d{10, 20, 30, 40};
  EXPECT_EQ(hessian_pd_check(g, d).status, HessianStatus::PositiveDefinite);
}

TEST(Classify, ExpensiveGoesLowFreeGoesHigh) {
  auto g = sampled(6);
  const std::vector<double> d(g.size(), 100.0);
  auto pricey = g;
  for (auto& o : pricey.orgs) o.cost_per_joule = 1e9;
  auto free = g;
  for (auto& o : free.orgs) o.cost_per_joule = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    EXPECT_EQ(classify_case(pricey, d, n), BoundCase::LowerBound);
    EXPECT_EQ(classify_case(free, d, n), BoundCase::UpperBound);
  }
  const auto all_low = solve(pricey);
  EXPECT_EQ(all_low.profile, StrategyProfile::uniform(g.size(), g.mech.d_min));
  const auto all_high = solve(free);
  EXPECT_EQ(all_high.profile, StrategyProfile::uniform(g.size(), g.mech.d_max));
}

TEST(Classify, MidCostInteriorAgreesWithOracle) {
  // Two orgs chosen so that the grid optimum sits strictly inside the box.
  const auto g = sampled(14, 2, {0, 1}, "complex@0.5");
  const auto oracle = brute_force_oracle(g, 1);
  const auto solved = solve(g);
  for (std::size_t n = 0; n < 2; ++n) {
    if (oracle.d_gen[n] > g.mech.d_min && oracle.d_gen[n] < g.mech.d_max) {
      EXPECT_EQ(solved.diagnostics.case_labels[n], BoundCase::Interior);
    }
    EXPECT_LE(std::abs(solved.profile.d_gen[n] - oracle.d_gen[n]), 1);
  }
}

TEST(Fpi, OperatorProperties) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = sampled(500 + static_cast<std::uint64_t>(trial));
    std::vector<double> u(g.size()), bigger(g.size()), doubled(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
      u[n] = static_cast<double>(g.orgs[n].d_loc) + rng.uniform(0.0, 6000.0);
      bigger[n] = u[n] + rng.uniform(1.0, 500.0);
      doubled[n] = 2.0 * u[n];
    }
    const auto m = fpi_update(g, u), mb = fpi_update(g, bigger), m2 = fpi_update(g, doubled);
    for (std::size_t n = 0; n < g.size(); ++n) {
      EXPECT_GT(m[n], 0.0);
      EXPECT_LT(mb[n], m[n]);
      EXPECT_LT(m2[n], 2.0 * m[n]);
    }
  }
}

TEST(Fpi, RejectsTotalsBelowLocalData) {
  const auto g = three_org_instance();
  EXPECT_THROW(fpi_update(g, std::vector<double>{1, 1, 1}), PreconditionError);
}

TEST(Solve, InteriorCoordinatesAreFixedPoints) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = sampled(seed);
    const auto r = solve(g);
    ASSERT_TRUE(r.diagnostics.converged);
    std::vector<double> u(g.size());
    for (std::size_t n = 0; n < g.size(); ++n)
      u[n] = static_cast<double>(g.orgs[n].d_loc) + r.diagnostics.continuous_solution[n];
    const auto m = fpi_update(g, u);
    for (std::size_t n = 0; n < g.size(); ++n) {
      if (r.diagnostics.case_labels[n] != BoundCase::Interior) continue;
      EXPECT_LT(rel_diff(m[n], u[n]), 1e-8) << "seed " << seed << " org " << n;
      EXPECT_LE(std::abs(r.diagnostics.foc_residuals[n]), 1e-6);
    }
  }
}

TEST(Solve, SymmetricOrgsGetSameAmount) {
  const auto g = identical_orgs(4);
  const auto r = solve(g);
  for (auto d : r.profile.d_gen) EXPECT_EQ(d, r.profile.d_gen[0]);
}

TEST(Solve, Deterministic) {
  const auto g = sampled(77);
  const auto a = solve(g), b = solve(g);
  EXPECT_EQ(a.profile, b.profile);
  EXPECT_EQ(a.diagnostics, b.diagnostics);
}

TEST(Solve, RoundedProfileBeatsUnitMoves) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = sampled(seed, 6, {0, 1}, "complex@0.5");
    const auto r = solve(g);
    const auto s = r.profile.as_real();
    const double f = potential(g, s);
    for (std::size_t n = 0; n < g.size(); ++n) {
      for (double step : {-1.0, 1.0}) {
        auto t = s;
        t[n] += step;
        if (t[n] < static_cast<double>(g.mech.d_min) || t[n] > static_cast<double>(g.mech.d_max)) continue;
        EXPECT_LE(f, potential(g, t) + 1e-12);
      }
    }
  }
}

TEST(Solve, PotentialTraceNeverRises) {
  const auto r = solve(sampled(9));
  const auto& trace = r.diagnostics.potential_trace;
  ASSERT_GE(trace.size(), 2u);
  EXPECT_GE(r.diagnostics.iterations, 1);
  EXPECT_LE(trace.back(), trace.front());
}

TEST(Solve, DiagnosticsReportBudgetAndIr) {
  const auto g = sampled(10);
  const auto r = solve(g);
  EXPECT_LE(std::abs(r.diagnostics.budget_residual), 1e-12);
  const auto ir = check_ir(g, r.profile.as_real());
  EXPECT_EQ(r.diagnostics.ir_pass, ir);
}

TEST(Solve, XiAbovePhiIsRecordedNotFatal) {
  const auto g = sampled(10).with_xi(320.0);
  SolveResult r;
  ASSERT_NO_THROW(r = solve(g));
  EXPECT_TRUE(std::any_of(r.diagnostics.violations.begin(), r.diagnostics.violations.end(),
                          [](const std::string& v) { return v.find("xi exceeds phi") != std::string::npos; }));
}

TEST(Solve, RejectsBadSettings) {
  SolverSettings s;
  s.k_max = 0;
  EXPECT_THROW(solve(three_org_instance(), s), PreconditionError);
}

TEST(Solve, IterateChangeRuleAlsoConverges) {
  SolverSettings s;
  s.stop_rule = StopRule::IterateChange;
  const auto g = sampled(12);
  const auto a = solve(g, s), b = solve(g);
  EXPECT_TRUE(a.diagnostics.converged);
  for (std::size_t n = 0; n < g.size(); ++n) EXPECT_LE(std::abs(a.profile.d_gen[n] - b.profile.d_gen[n]), 1);
}

TEST(Oracle, CoarseGridBracketsFineOptimum) {
  const auto g = sampled(3, 2, {0, 1}, "complex@0.5");
  const auto fine = brute_force_oracle(g, 1);
  const auto coarse = brute_force_oracle(g, 100);
  EXPECT_LE(potential(g, fine), potential(g, coarse));
  for (auto d : coarse.d_gen) EXPECT_EQ(d % 100, 0);
}

TEST(Oracle, MatchesSolverOnSmallInstances) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = sampled(seed, 2, {0, 1}, "complex@0.5");
    const auto oracle = brute_force_oracle(g, 1);
    const auto r = solve(g);
    EXPECT_LE(potential(g, r.profile), potential(g, oracle) + 1e-9);
  }
}

TEST(Oracle, RefusesHugeGrids) {
  const auto g = sampled(1, 5);
  EXPECT_GT(oracle_grid_size(g, 1), 1e9);
  EXPECT_THROW(brute_force_oracle(g, 1), PreconditionError);
  EXPECT_THROW(brute_force_oracle(g, 0), PreconditionError);
}
