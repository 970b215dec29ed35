#include "coopgen/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <thread>

#include "coopgen/errors.hpp"
#include "coopgen/random.hpp"

namespace coopgen {

const char* to_string(Method m) {
  switch (m) {
    case Method::CoCoGen: return "cocogen";
    case Method::Vcfl: return "vcfl";
    case Method::Wco: return "wco";
    case Method::Wdg: return "wdg";
    case Method::Radg: return "radg";
    case Method::Madg: return "madg";
  }
  return "?";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {Method::CoCoGen, Method::Vcfl, Method::Wco,
                                              Method::Wdg,     Method::Radg, Method::Madg};
  return methods;
}

std::optional<Method> parse_method(std::string_view name) {
  for (auto m : all_methods())
    if (name == to_string(m)) return m;
  return std::nullopt;
}

namespace {

constexpr std::uint64_t kRadgStream = 0x7261646700ULL;

RoundReport evaluate(const GameInstance& g, Method method, StrategyProfile strategy, int round) {
  RoundReport r;
  r.round = round;
  r.method = method;
  r.strategy = std::move(strategy);
  r.breakdowns = utilities(g, r.strategy);
  r.ledger = settle(g, r.strategy);
  r.welfare = social_welfare(r.breakdowns);
  r.global_err = global_error(g, r.strategy);
  return r;
}

RoundReport equilibrium_round(const GameInstance& g, Method method, const SolverSettings& settings,
                              int round) {
  auto solved = solve(g, settings);
  auto r = evaluate(g, method, std::move(solved.profile), round);
  r.converged = solved.diagnostics.converged;
  r.diagnostics = std::move(solved.diagnostics);
  return r;
}

}  // namespace

RoundReport run_round(const GameInstance& g, Method method, std::uint64_t seed,
                      const SolverSettings& settings, int round) {
  const std::size_t n = g.size();
  switch (method) {
    case Method::CoCoGen:
      return equilibrium_round(g, method, settings, round);
    case Method::Wco: {
      auto r = equilibrium_round(g.without_competition(), method, settings, round);
      r.competition_removed = true;
      return r;
    }
    case Method::Vcfl: {
      auto r = evaluate(g.without_competition(), method, StrategyProfile::uniform(n, 0), round);
      r.competition_removed = true;
      return r;
    }
    case Method::Wdg:
      return evaluate(g, method, StrategyProfile::uniform(n, 0), round);
    case Method::Madg:
      return evaluate(g, method, StrategyProfile::uniform(n, g.mech.d_max), round);
    case Method::Radg: {
      Rng rng(derive_seed(seed, kRadgStream + static_cast<std::uint64_t>(round)));
      StrategyProfile s;
      for (std::size_t i = 0; i < n; ++i) s.d_gen.push_back(rng.uniform_int(g.mech.d_min, g.mech.d_max));
      return evaluate(g, method, std::move(s), round);
    }
  }
  throw PreconditionError("unknown method");
}

std::vector<RoundReport> run_rounds(const GameInstance& g, Method method, std::uint64_t seed,
                                    int rounds, const SolverSettings& settings) {
  if (rounds < 1) throw PreconditionError("rounds must be at least 1");
  std::vector<RoundReport> out;
  out.reserve(static_cast<std::size_t>(rounds));
  for (int t = 1; t <= rounds; ++t) out.push_back(run_round(g, method, seed, settings, t));
  return out;
}

RoundReport run_baseline_wco(const GameInstance& g, const SolverSettings& settings) {
  return run_round(g, Method::Wco, 0, settings);
}

RoundReport run_baseline_wdg(const GameInstance& g) { return run_round(g, Method::Wdg, 0); }

std::size_t SweepResult::succeeded() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.ok; }));
}

void check_sweep_spec(const SweepSpec& spec) {
  if (spec.gamma_regimes.empty()) throw PreconditionError("sweep needs at least one gamma regime");
  if (spec.presets.empty()) throw PreconditionError("sweep needs at least one scaling-law preset");
  if (spec.xi_grid.empty()) throw PreconditionError("sweep needs at least one xi value");
  if (spec.methods.empty()) throw PreconditionError("sweep needs at least one method");
  if (spec.seeds.empty()) throw PreconditionError("sweep needs at least one seed");
  if (spec.rounds < 1) throw PreconditionError("sweep rounds must be at least 1");
  if (spec.n_orgs < 2) throw PreconditionError("sweep needs at least 2 organizations");
  for (const auto& r : spec.gamma_regimes)
    if (!gamma_regime(r)) throw PreconditionError("unknown gamma regime '" + r + "' (low, moderate, high)");
  for (const auto& p : spec.presets)
    if (!find_preset(p)) throw PreconditionError("unknown scaling-law preset '" + p + "'");
  for (double xi : spec.xi_grid)
    if (!(xi >= 0.0)) throw PreconditionError("xi values must be non-negative");
}

namespace {

struct CellKey {
  std::size_t regime, preset, xi, method, seed;
};

SweepRow run_cell(const SweepSpec& spec, const GameInstance& base, const CellKey& key) {
  SweepRow row;
  row.regime = spec.gamma_regimes[key.regime];
  row.preset = spec.presets[key.preset];
  row.xi = spec.xi_grid[key.xi];
  row.method = spec.methods[key.method];
  row.seed = spec.seeds[key.seed];
  try {
    const GameInstance g = base.with_xi(row.xi);
    for (const auto& v : validate_instance(g)) {
      if (v.code != "xi_exceeds_phi") throw InstanceError(v.message);
      row.flags = "xi_exceeds_phi";
    }
    const auto reports = run_rounds(g, row.method, row.seed, spec.rounds, spec.solver);
    double dgen_sum = 0.0;
    row.min_utility = std::numeric_limits<double>::infinity();
    row.converged = true;
    for (const auto& r : reports) {
      row.welfare += r.welfare;
      for (auto d : r.strategy.d_gen) dgen_sum += static_cast<double>(d);
      for (const auto& b : r.breakdowns) {
        row.min_utility = std::min(row.min_utility, b.utility);
        if (b.utility < 0.0) ++row.ir_violations;
      }
      row.converged = row.converged && r.converged;
    }
    row.mean_dgen = dgen_sum / static_cast<double>(reports.size() * g.size());
    row.ok = true;
    if (spec.keep_reports) row.reports = reports;
  } catch (const Error& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  check_sweep_spec(spec);
  const std::size_t n_reg = spec.gamma_regimes.size(), n_pre = spec.presets.size(),
                    n_xi = spec.xi_grid.size(), n_met = spec.methods.size(), n_seed = spec.seeds.size();

  // Base instances per (regime, preset, seed), drawn at xi = 0 so that every
  // xi and method sees the same organizations.
  std::vector<std::optional<GameInstance>> bases(n_reg * n_pre * n_seed);
  std::vector<std::string> base_errors(bases.size());
  for (std::size_t r = 0; r < n_reg; ++r) {
    for (std::size_t p = 0; p < n_pre; ++p) {
      for (std::size_t s = 0; s < n_seed; ++s) {
        SamplingSpec sampling = spec.sampling;
        sampling.seed = spec.seeds[s];
        sampling.gamma = *gamma_regime(spec.gamma_regimes[r]);
        sampling.law = *find_preset(spec.presets[p]);
        MechanismParams mech = spec.mech;
        mech.xi = 0.0;
        const std::size_t idx = (r * n_pre + p) * n_seed + s;
        try {
          bases[idx] = sample_instance(sampling, spec.n_orgs, mech);
        } catch (const Error& e) {
          base_errors[idx] = e.what();
        }
      }
    }
  }

  std::vector<CellKey> cells;
  cells.reserve(n_reg * n_pre * n_xi * n_met * n_seed);
  for (std::size_t r = 0; r < n_reg; ++r)
    for (std::size_t p = 0; p < n_pre; ++p)
      for (std::size_t x = 0; x < n_xi; ++x)
        for (std::size_t m = 0; m < n_met; ++m)
          for (std::size_t s = 0; s < n_seed; ++s) cells.push_back({r, p, x, m, s});

  SweepResult result;
  result.rows.resize(cells.size());
  auto work = [&](std::size_t i) {
    const auto& key = cells[i];
    const std::size_t base_idx = (key.regime * n_pre + key.preset) * n_seed + key.seed;
    if (bases[base_idx]) {
      result.rows[i] = run_cell(spec, *bases[base_idx], key);
    } else {
      SweepRow row;
      row.regime = spec.gamma_regimes[key.regime];
      row.preset = spec.presets[key.preset];
      row.xi = spec.xi_grid[key.xi];
      row.method = spec.methods[key.method];
      row.seed = spec.seeds[key.seed];
      row.error = base_errors[base_idx];
      result.rows[i] = std::move(row);
    }
  };

  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) work(i);
      });
    }
  }

  // Rows for one (regime, preset, xi, method) are contiguous (seed innermost).
  for (std::size_t start = 0; start < result.rows.size(); start += n_seed) {
    SweepSummary s;
    const auto& first = result.rows[start];
    s.regime = first.regime;
    s.preset = first.preset;
    s.xi = first.xi;
    s.method = first.method;
    s.min_welfare = std::numeric_limits<double>::infinity();
    s.max_welfare = -std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < start + n_seed; ++i) {
      const auto& row = result.rows[i];
      if (!row.ok) {
        ++s.n_failed;
        continue;
      }
      ++s.n_ok;
      s.mean_welfare += row.welfare;
      s.mean_dgen += row.mean_dgen;
      s.min_welfare = std::min(s.min_welfare, row.welfare);
      s.max_welfare = std::max(s.max_welfare, row.welfare);
    }
    if (s.n_ok) {
      s.mean_welfare /= static_cast<double>(s.n_ok);
      s.mean_dgen /= static_cast<double>(s.n_ok);
    } else {
      s.min_welfare = s.max_welfare = 0.0;
    }
    result.summary.push_back(std::move(s));
  }
  return result;
}

}  // namespace coopgen
