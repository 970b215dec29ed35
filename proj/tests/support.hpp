#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "coopgen/model.hpp"
#include "coopgen/random.hpp"

namespace coopgen::testing {

/// Three organizations with hand-picked values. Reference numbers for this
/// instance were computed independently at 30 significant digits.
inline GameInstance three_org_instance() {
  GameInstance g;
  const ScalingLaw law{1.2, 0.27, 0.03};
  auto org = [&](std::int64_t d_loc, double f, double c, double psi, double phi) {
    OrganizationProfile o;
    o.d_loc = d_loc;
    o.freq = f;
    o.cost_per_joule = c;
    o.psi = psi;
    o.phi = phi;
    o.law = law;
    return o;
  };
  g.orgs = {org(1200, 2.5e9, 0.4, 520, 310), org(300, 4e9, 0.3, 450, 250), org(2500, 1.5e9, 0.5, 580, 380)};
  g.comp = CompetitionMatrix(3);
  g.comp.set_pair(0, 1, 0.3);
  g.comp.set_pair(0, 2, 0.9);
  g.comp.set_pair(1, 2, 0.6);
  g.mech = MechanismParams{};
  return g;
}

inline GameInstance sampled(std::uint64_t seed, std::size_t n = 10, Range gamma = {0, 1},
                            const std::string& preset = "medium@0.5", double xi = 90.0) {
  SamplingSpec spec;
  spec.seed = seed;
  spec.gamma = gamma;
  spec.law = *find_preset(preset);
  MechanismParams mech;
  mech.xi = xi;
  return sample_instance(spec, n, mech);
}

inline std::vector<double> random_profile(Rng& rng, const GameInstance& g) {
  std::vector<double> d(g.size());
  for (auto& x : d) x = static_cast<double>(rng.uniform_int(g.mech.d_min, g.mech.d_max));
  return d;
}

/// F evaluated from its definition in extended precision. Used as a
/// finite-difference oracle where double-precision differences of F lose
/// too many digits (gradients near 1e-9 against F near 1).
inline long double potential_extended(const GameInstance& g, const std::vector<double>& d) {
  const std::size_t n = g.size();
  long double mean = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& law = g.orgs[i].law;
    const long double total = static_cast<long double>(g.orgs[i].d_loc) + d[i];
    mean += static_cast<long double>(law.alpha) * std::pow(total, -static_cast<long double>(law.beta)) -
            static_cast<long double>(law.delta);
  }
  mean /= static_cast<long double>(n);
  long double f = std::exp((mean - 1.0L) / static_cast<long double>(g.mech.varrho));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = g.orgs[i];
    long double z = -static_cast<long double>(o.psi);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) z += static_cast<long double>(g.comp(i, j)) * (g.mech.xi - g.orgs[j].phi);
    }
    const long double k = static_cast<long double>(o.cost_per_joule) * o.kappa * (o.eta + o.mu) *
                          static_cast<long double>(o.freq) * o.freq;
    f -= k * d[i] / z;
  }
  return f;
}

/// Central difference of potential_extended() along coordinate n.
inline double central_difference(const GameInstance& g, const std::vector<double>& d, std::size_t n,
                                 double h = 1e-3) {
  auto up = d, down = d;
  up[n] += h;
  down[n] -= h;
  return static_cast<double>((potential_extended(g, up) - potential_extended(g, down)) / (2.0L * h));
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace coopgen::testing
