#include <gtest/gtest.h>

#include <cmath>

#include "coopgen/economics.hpp"
#include "coopgen/equilibrium.hpp"
#include "coopgen/errors.hpp"
#include "support.hpp"

using namespace coopgen;
using coopgen::testing::rel_diff;
using coopgen::testing::sampled;
using coopgen::testing::three_org_instance;

namespace {

// Two orgs, shared law alpha=1, beta=0.5, delta=0.
GameInstance two_org(double gamma = 0.0, double xi = 0.0) {
  GameInstance g;
  g.orgs.resize(2);
  for (auto& o : g.orgs) {
    o.d_loc = 100;
    o.cost_per_joule = 0.3;
    o.psi = 500;
    o.phi = 300;
    o.law = {1.0, 0.5, 0.0};
  }
  g.comp = CompetitionMatrix(2);
  g.comp.set_pair(0, 1, gamma);
  g.mech.xi = xi;
  return g;
}

}  // namespace

TEST(LocalError, SpecPoints) {
  EXPECT_DOUBLE_EQ(local_error({1.0, 0.5, 0.0}, 100), 0.1);
  EXPECT_DOUBLE_EQ(local_error({2.0, 1.0, 0.5}, 4), 0.0);
  EXPECT_NEAR(local_error({0.9, 0.2, 0.1}, 1500), 0.10846073161147300379, 1e-15);
}

TEST(LocalError, RejectsEmptyTrainingSet) {
  EXPECT_THROW(local_error({1.0, 0.5, 0.0}, 0.0), DomainError);
}

TEST(GlobalError, ZeroExponentAndMeanPointFour) {
  // alpha = 1 + delta with d = 1 gives eps_n = 1 exactly.
  GameInstance g = two_org();
  for (auto& o : g.orgs) {
    o.d_loc = 1;
    o.law = {1.5, 1e-6, 0.5};
  }
  const std::vector<double> zero{0, 0};
  EXPECT_DOUBLE_EQ(global_error(g, zero), 1.0);

  // eps_n = 0.4 for both: alpha * 100^-0.5 = 0.4 -> alpha = 4.
  g = two_org();
  for (auto& o : g.orgs) o.law = {4.0, 0.5, 0.0};
  EXPECT_NEAR(global_error(g, zero), 0.90483741803595957316, 1e-15);
}

TEST(GlobalError, NeverIncreasesWithMoreGeneration) {
  const auto g = sampled(21);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto d = coopgen::testing::random_profile(rng, g);
    const auto n = static_cast<std::size_t>(rng.uniform_int(0, 9));
    const double before = global_error(g, d);
    d[n] += 1.0;
    EXPECT_LE(global_error(g, d), before);
  }
}

TEST(MarginalContribution, PinnedTwoOrgValue) {
  const auto g = two_org();
  const std::vector<double> d{400, 0};
  EXPECT_NEAR(marginal_contribution(g, d, 0), 0.0039557789813604127044, 1e-15);
  EXPECT_EQ(marginal_contribution(g, d, 1), 0.0);
}

TEST(MarginalContribution, SymmetricOrgsMatch) {
  const auto g = two_org(0.5, 90);
  const std::vector<double> d{250, 250};
  EXPECT_EQ(marginal_contribution(g, d, 0), marginal_contribution(g, d, 1));
  EXPECT_GT(marginal_contribution(g, d, 0), 0.0);
}

TEST(CooperationGain, Arithmetic) {
  // psi (eps0 - eps) with eps0 = 0.9 and eps = 0.4.
  GameInstance g = two_org();
  for (auto& o : g.orgs) o.law = {4.0, 0.5, 0.0};
  g.mech.epsilon0 = std::exp((0.4 - 1.0) / 6.0) + 0.5;
  const std::vector<double> zero{0, 0};
  EXPECT_NEAR(cooperation_gain(g, zero, 0), 250.0, 1e-12);
  g.orgs[0].psi = 0.0;
  EXPECT_EQ(cooperation_gain(g, zero, 0), 0.0);
}

TEST(CompetitionTerms, ScaleWithGapAsStated) {
  GameInstance g;
  g.orgs.resize(3);
  for (auto& o : g.orgs) {
    o.d_loc = 500;
    o.cost_per_joule = 0.3;
    o.psi = 500;
    o.phi = 300;
    o.law = {1.2, 0.27, 0.03};
  }
  g.comp = CompetitionMatrix(3);
  g.comp.set_pair(0, 1, 0.5);
  g.comp.set_pair(0, 2, 0.5);
  g.comp.set_pair(1, 2, 0.5);
  g.mech.xi = 90;
  const std::vector<double> d{800, 100, 0};
  const double gap = marginal_contribution(g, d, 0);
  ASSERT_GT(gap, 0.0);
  // 0.5*300*gap*2 and 0.5*90*gap*2; at gap = 0.02 these are 6.0 and 1.8.
  EXPECT_NEAR(competition_loss(g, d, 0) / gap * 0.02, 6.0, 1e-12);
  EXPECT_NEAR(redistribution_receipts(g, d, 0) / gap * 0.02, 1.8, 1e-12);
  EXPECT_EQ(competition_loss(g, d, 2), 0.0);
  EXPECT_EQ(redistribution_receipts(g, d, 2), 0.0);

  g.mech.xi = 0.0;
  EXPECT_EQ(redistribution_receipts(g, d, 0), 0.0);
  g.mech.xi = 300.0;
  EXPECT_DOUBLE_EQ(redistribution_receipts(g, d, 0), competition_loss(g, d, 0));

  const auto none = g.without_competition();
  EXPECT_EQ(competition_loss(none, d, 0), 0.0);
}

TEST(ComputeCost, EnergyExamples) {
  OrganizationProfile o;
  o.d_loc = 1000;
  o.freq = 2e9;
  o.cost_per_joule = 1.0;
  EXPECT_NEAR(compute_cost(o, 0), 1.2, 1e-12);
  EXPECT_NEAR(compute_cost(o, 500), 2.4, 1e-12);
  o.d_loc = 0;
  EXPECT_EQ(compute_cost(o, 0), 0.0);
  EXPECT_THROW(compute_cost(o, -1), PreconditionError);
}

TEST(Utility, ThreeOrgReferenceValues) {
  const auto g = three_org_instance();
  const std::vector<double> d{450, 800, 120};
  EXPECT_NEAR(global_error(g, d), 0.86534852610686503497, 1e-14);

  struct Ref {
    double gap, gain, p_mag, r_mag, cost, utility, z;
  };
  const Ref ref[3] = {
      {0.0007010834975210341146, 70.018766424430181817, 0.075717017732271684377, 0.29235181846627122579, 1.575,
       67.660401225164181358, -829},
      {0.0036670020576268960337, 60.593163251910734264, 0.29702716666777857873, 1.1771076604982336268, 2.736,
       57.737243745741189312, -690},
      {0.000087764065150034264882, 78.097854858018279718, 0.011848148795254625759, 0.037650783949364699634,
       0.92475, 76.198907493172389792, -874},
  };
  for (std::size_t n = 0; n < 3; ++n) {
    const auto b = utility(g, d, n);
    EXPECT_LT(rel_diff(b.contribution_gap, ref[n].gap), 1e-9) << n;
    EXPECT_LT(rel_diff(b.gain, ref[n].gain), 1e-12) << n;
    EXPECT_LT(rel_diff(redistribution_receipts(g, d, n), ref[n].p_mag), 1e-9) << n;
    EXPECT_LT(rel_diff(competition_loss(g, d, n), ref[n].r_mag), 1e-9) << n;
    EXPECT_LT(rel_diff(b.compute_cost, ref[n].cost), 1e-12) << n;
    EXPECT_LT(rel_diff(b.utility, ref[n].utility), 1e-12) << n;
    EXPECT_DOUBLE_EQ(weight_z(g, n), ref[n].z);
    EXPECT_EQ(b.server_fee, 1.0);
    EXPECT_NEAR(b.recomputed(), b.utility, 1e-12);
  }
  EXPECT_LT(rel_diff(social_welfare(g, d), 201.59655246407776046), 1e-12);
}

TEST(Utility, NoCompetitionLeavesGainMinusCosts) {
  const auto g = two_org(0.0, 0.0);
  const std::vector<double> d{300, 50};
  for (std::size_t n = 0; n < 2; ++n) {
    const auto b = utility(g, d, n);
    EXPECT_NEAR(b.utility, b.gain - b.compute_cost - g.mech.c0, 1e-12);
  }
}

TEST(Utility, XiEqualPhiCancels) {
  auto g = sampled(4);
  for (auto& o : g.orgs) o.phi = 250.0;
  g.mech.xi = 250.0;
  Rng rng(3);
  const auto d = coopgen::testing::random_profile(rng, g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto b = utility(g, d, n);
    EXPECT_NEAR(b.utility, b.gain - b.compute_cost - b.server_fee, 1e-10);
    EXPECT_DOUBLE_EQ(weight_z(g, n), -g.orgs[n].psi);
  }
}

TEST(Welfare, SumOfUtilitiesAndSymmetry) {
  const auto g = two_org(0.5, 90);
  const std::vector<double> d{200, 200};
  const auto parts = utilities(g, d);
  EXPECT_NEAR(social_welfare(parts), parts[0].utility + parts[1].utility, 1e-12);
  EXPECT_NEAR(social_welfare(g, d), 2.0 * parts[0].utility, 1e-12);
  EXPECT_EQ(social_welfare(std::vector<UtilityBreakdown>{}), 0.0);
}

TEST(CheckIr, WeakInequality) {
  EXPECT_EQ(check_ir(std::vector<double>{1, 0, 2.5}), (std::vector<bool>{true, true, true}));
  EXPECT_EQ(check_ir(std::vector<double>{-0.1, 5}), (std::vector<bool>{false, true}));
}

TEST(Settlement, IdenticalOrgsTransferNothing) {
  const auto g = two_org(0.5, 90);
  const auto ledger = settle(g, std::vector<double>{300, 300});
  for (double t : ledger.transfers) EXPECT_EQ(t, 0.0);
}

TEST(Settlement, PairwiseArithmetic) {
  // t = xi * gamma * (gap_1 - gap_2); gaps (0.03, 0.01) give 0.9.
  const auto g = two_org(0.5, 90);
  const std::vector<double> d{900, 100};
  const auto ledger = settle(g, d);
  const double g0 = marginal_contribution(g, d, 0), g1 = marginal_contribution(g, d, 1);
  EXPECT_NEAR(ledger.at(0, 1), 90 * 0.5 * (g0 - g1), 1e-15);
  EXPECT_NEAR(ledger.at(0, 1) / (g0 - g1) * 0.02, 0.9, 1e-12);
  EXPECT_EQ(ledger.net[0], -ledger.net[1]);
}

TEST(Settlement, ZeroSumAndAntisymmetricOnRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto g = sampled(seed);
    Rng rng(seed);
    const auto ledger = settle(g, coopgen::testing::random_profile(rng, g));
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) EXPECT_EQ(ledger.at(i, j), -ledger.at(j, i));
    EXPECT_LE(std::abs(ledger.total()), 1e-12);
  }
}

TEST(Settlement, NoGenerationNoTransfers) {
  const auto g = sampled(8);
  const auto ledger = settle(g, std::vector<double>(g.size(), 0.0));
  for (double t : ledger.net) EXPECT_EQ(t, 0.0);
}

TEST(Settlement, RequiresSymmetricMatrix) {
  auto g = two_org(0.5, 90);
  g.comp(0, 1) = 0.2;
  EXPECT_THROW(settle(g, std::vector<double>{1, 2}), PreconditionError);
}

TEST(Profiles, SizeMismatchRejected) {
  const auto g = two_org();
  EXPECT_THROW(global_error(g, std::vector<double>{1, 2, 3}), PreconditionError);
  EXPECT_THROW(utility(g, std::vector<double>{1, 2}, 5), PreconditionError);
}
