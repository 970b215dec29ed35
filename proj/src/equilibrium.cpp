#include "coopgen/equilibrium.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "coopgen/economics.hpp"
#include "coopgen/errors.hpp"

namespace coopgen {

const char* to_string(BoundCase c) {
  switch (c) {
    case BoundCase::LowerBound: return "lower-bound";
    case BoundCase::UpperBound: return "upper-bound";
    case BoundCase::Interior: return "interior";
  }
  return "?";
}

const char* to_string(StopRule r) {
  return r == StopRule::PotentialChange ? "potential-change" : "iterate-change";
}

const char* to_string(HessianStatus s) {
  switch (s) {
    case HessianStatus::PositiveDefinite: return "positive-definite";
    case HessianStatus::NotPositiveDefinite: return "not-positive-definite";
    case HessianStatus::NumericalBreakdown: return "numerical-breakdown";
  }
  return "?";
}

double weight_z(const GameInstance& g, std::size_t n) {
  double sum = 0.0;
  for (std::size_t m = 0; m < g.orgs.size(); ++m)
    if (m != n) sum += g.comp(n, m) * (g.mech.xi - g.orgs[m].phi);
  return sum - g.orgs[n].psi;
}

namespace {

// Per-organization constants of the potential, computed once per instance.
struct PotentialTerms {
  std::vector<double> z;
  std::vector<double> a2;    // kappa C (eta + mu) f^2 / z  (negative)
  std::vector<double> d_loc;

  explicit PotentialTerms(const GameInstance& g) {
    const std::size_t size = g.orgs.size();
    z.resize(size);
    a2.resize(size);
    d_loc.resize(size);
    for (std::size_t n = 0; n < size; ++n) {
      const auto& o = g.orgs[n];
      z[n] = weight_z(g, n);
      if (!(z[n] < 0.0)) {
        std::ostringstream msg;
        msg << "weighted potential requires z_n < 0; organization " << n << " has z = " << z[n];
        throw InstanceError(msg.str());
      }
      a2[n] = o.kappa * o.cost_per_joule * (o.eta + o.mu) * o.freq * o.freq / z[n];
      d_loc[n] = static_cast<double>(o.d_loc);
    }
  }
};

double potential_with(const GameInstance& g, const PotentialTerms& t, std::span<const double> d_gen) {
  double cost = 0.0;
  for (std::size_t n = 0; n < d_gen.size(); ++n) cost += t.a2[n] * d_gen[n];
  return global_error(g, d_gen) - cost;
}

// Shared exponential exp((mean eps - 1) / varrho) of a profile.
double shared_exp(const GameInstance& g, std::span<const double> d_gen) {
  return global_error(g, d_gen);
}

double gradient_with(const GameInstance& g, const PotentialTerms& t, std::span<const double> d_gen,
                     std::size_t n) {
  const auto& law = g.orgs[n].law;
  const double size = static_cast<double>(g.orgs.size());
  const double total = t.d_loc[n] + d_gen[n];
  const double a3 = std::pow(total, -law.beta - 1.0);
  return -(law.alpha * law.beta / (size * g.mech.varrho)) * a3 * shared_exp(g, d_gen) - t.a2[n];
}

BoundCase classify_with(const GameInstance& g, const PotentialTerms& t,
                        std::span<const double> d_gen, std::size_t n) {
  std::vector<double> probe(d_gen.begin(), d_gen.end());
  probe[n] = static_cast<double>(g.mech.d_min);
  if (gradient_with(g, t, probe, n) >= 0.0) return BoundCase::LowerBound;
  probe[n] = static_cast<double>(g.mech.d_max);
  if (gradient_with(g, t, probe, n) <= 0.0) return BoundCase::UpperBound;
  return BoundCase::Interior;
}

double fpi_component(const GameInstance& g, const PotentialTerms& t, double mean_eps, std::size_t n) {
  const auto& law = g.orgs[n].law;
  const double size = static_cast<double>(g.orgs.size());
  const double base = -(t.a2[n] * size * g.mech.varrho / (law.alpha * law.beta)) *
                      std::exp(-(mean_eps - 1.0) / g.mech.varrho);
  if (!(base > 0.0) || !std::isfinite(base)) {
    std::ostringstream msg;
    msg << "fixed-point base is not positive for organization " << n << " (base = " << base
        << "); check z_n < 0 and a positive generation cost";
    throw InstanceError(msg.str());
  }
  return std::pow(base, -1.0 / (law.beta + 1.0));
}

double mean_eps_of_totals(const GameInstance& g, std::span<const double> u) {
  double sum = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) sum += local_error(g.orgs[n].law, u[n]);
  return sum / static_cast<double>(u.size());
}

void check_size(const GameInstance& g, std::size_t size) {
  if (size != g.orgs.size()) {
    throw PreconditionError("profile has " + std::to_string(size) + " entries for " +
                            std::to_string(g.orgs.size()) + " organizations");
  }
}

}  // namespace

double potential(const GameInstance& g, std::span<const double> d_gen) {
  check_size(g, d_gen.size());
  return potential_with(g, PotentialTerms(g), d_gen);
}

double potential(const GameInstance& g, const StrategyProfile& s) {
  return potential(g, s.as_real());
}

double check_potential_identity(const GameInstance& g, std::span<const double> s,
                                std::span<const double> s_dev, std::size_t n) {
  check_size(g, s.size());
  check_size(g, s_dev.size());
  if (n >= g.orgs.size()) throw PreconditionError("organization index out of range");
  for (std::size_t m = 0; m < s.size(); ++m) {
    if (m != n && s[m] != s_dev[m]) {
      throw PreconditionError("profiles differ at index " + std::to_string(m) +
                              " besides the deviating organization " + std::to_string(n));
    }
  }
  const PotentialTerms t(g);
  const double df = potential_with(g, t, s) - potential_with(g, t, s_dev);
  const double du = utility(g, s, n).utility - utility(g, s_dev, n).utility;
  return df - du / t.z[n];
}

double check_potential_identity(const GameInstance& g, const StrategyProfile& s,
                                const StrategyProfile& s_dev, std::size_t n) {
  return check_potential_identity(g, s.as_real(), s_dev.as_real(), n);
}

double potential_gradient(const GameInstance& g, std::span<const double> d_gen, std::size_t n) {
  check_size(g, d_gen.size());
  if (n >= g.orgs.size()) throw PreconditionError("organization index out of range");
  return gradient_with(g, PotentialTerms(g), d_gen, n);
}

double HessianCheck::quadratic_form(std::span<const double> zeta) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sum += zeta[i] * at(i, j) * zeta[j];
  return sum;
}

HessianCheck hessian_pd_check(const GameInstance& g, std::span<const double> d_gen) {
  check_size(g, d_gen.size());
  const std::size_t size = g.orgs.size();
  const double scale = static_cast<double>(size) * g.mech.varrho;
  const double e = shared_exp(g, d_gen);

  std::vector<double> z_vec(size), diag(size);
  for (std::size_t i = 0; i < size; ++i) {
    const auto& law = g.orgs[i].law;
    const double total = static_cast<double>(g.orgs[i].d_loc) + d_gen[i];
    z_vec[i] = law.alpha * law.beta / scale * std::pow(total, -law.beta - 1.0);
    diag[i] = law.alpha * law.beta * (law.beta + 1.0) / scale * std::pow(total, -law.beta - 2.0);
  }

  HessianCheck out;
  out.n = size;
  out.matrix.assign(size * size, 0.0);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j)
      out.matrix[i * size + j] = e * (z_vec[i] * z_vec[j] + (i == j ? diag[i] : 0.0));

  Eigen::MatrixXd h(size, size);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      const double v = out.at(i, j);
      if (!std::isfinite(v)) {
        out.status = HessianStatus::NumericalBreakdown;
        std::ostringstream msg;
        msg << "non-finite Hessian entry (" << i << ", " << j << ")";
        out.detail = msg.str();
        return out;
      }
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
    max_diag = std::max(max_diag, out.at(i, i));
  }
  if (!(max_diag > 0.0)) {
    out.status = HessianStatus::NumericalBreakdown;
    out.detail = "Hessian diagonal underflowed to zero";
    return out;
  }

  // Entries are O(1e-9); normalize before factorizing.
  const Eigen::MatrixXd scaled = h / max_diag;
  const Eigen::LLT<Eigen::MatrixXd> llt(scaled);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.info() == Eigen::Success ? eig.eigenvalues().minCoeff() * max_diag : 0.0;

  if (llt.info() != Eigen::Success) {
    out.status = HessianStatus::NotPositiveDefinite;
    std::ostringstream msg;
    msg << "Cholesky factorization failed at profile [";
    for (std::size_t i = 0; i < size; ++i) msg << (i ? ", " : "") << d_gen[i];
    msg << "]";
    out.detail = msg.str();
    return out;
  }
  out.status = HessianStatus::PositiveDefinite;
  return out;
}

BoundCase classify_case(const GameInstance& g, std::span<const double> d_gen, std::size_t n) {
  check_size(g, d_gen.size());
  if (n >= g.orgs.size()) throw PreconditionError("organization index out of range");
  return classify_with(g, PotentialTerms(g), d_gen, n);
}

std::vector<double> fpi_update(const GameInstance& g, std::span<const double> u) {
  check_size(g, u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double floor_n = std::max(1.0, static_cast<double>(g.orgs[n].d_loc));
    if (!(u[n] >= floor_n)) {
      throw PreconditionError("fixed-point input u[" + std::to_string(n) +
                              "] must be at least max(1, d_loc)");
    }
  }
  const PotentialTerms t(g);
  const double mean_eps = mean_eps_of_totals(g, u);
  std::vector<double> out(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) out[n] = fpi_component(g, t, mean_eps, n);
  return out;
}

namespace {

constexpr int kPolishSweeps = 200;
constexpr double kPolishTol = 1e-9;  // samples

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// One Jacobi sweep of the case-classified fixed-point iteration.
std::vector<double> iterate_once(const GameInstance& g, const PotentialTerms& t,
                                 std::span<const double> d_gen) {
  const double lo = static_cast<double>(g.mech.d_min);
  const double hi = static_cast<double>(g.mech.d_max);
  std::vector<double> totals(d_gen.size());
  for (std::size_t n = 0; n < d_gen.size(); ++n) totals[n] = t.d_loc[n] + d_gen[n];
  const double mean_eps = mean_eps_of_totals(g, totals);

  std::vector<double> next(d_gen.size());
  for (std::size_t n = 0; n < d_gen.size(); ++n) {
    switch (classify_with(g, t, d_gen, n)) {
      case BoundCase::LowerBound: next[n] = lo; break;
      case BoundCase::UpperBound: next[n] = hi; break;
      case BoundCase::Interior:
        next[n] = std::clamp(fpi_component(g, t, mean_eps, n) - t.d_loc[n], lo, hi);
        break;
    }
  }
  return next;
}

// Rounding: per coordinate keep whichever of floor/ceil gives the
// smaller potential, others held at their current values. Passes repeat until
// stable so the choice is optimal against the final profile.
StrategyProfile round_profile(const GameInstance& g, const PotentialTerms& t,
                              std::span<const double> continuous) {
  const std::size_t size = continuous.size();
  std::vector<double> current(continuous.begin(), continuous.end());
  auto pick = [&](std::size_t n) {
    const double fl = std::floor(continuous[n]);
    const double ce = std::ceil(continuous[n]);
    current[n] = ce;
    const double f_ceil = potential_with(g, t, current);
    current[n] = fl;
    const double f_floor = potential_with(g, t, current);
    double chosen = f_ceil < f_floor ? ce : fl;
    chosen = std::clamp(chosen, static_cast<double>(g.mech.d_min), static_cast<double>(g.mech.d_max));
    const bool changed = chosen != current[n];
    current[n] = chosen;
    return changed;
  };
  for (std::size_t n = 0; n < size; ++n) pick(n);
  for (int pass = 0; pass < 16; ++pass) {
    bool changed = false;
    for (std::size_t n = 0; n < size; ++n) {
      const double before = current[n];
      pick(n);
      changed = changed || current[n] != before;
    }
    if (!changed) break;
  }
  StrategyProfile s;
  s.d_gen.reserve(size);
  for (double v : current) s.d_gen.push_back(static_cast<std::int64_t>(v));
  return s;
}

}  // namespace

SolveResult solve(const GameInstance& g, const SolverSettings& settings) {
  if (!(settings.eps_tol > 0.0) || settings.k_max < 1 || settings.oracle_grid_step < 1) {
    throw PreconditionError("solver settings need eps_tol > 0, k_max >= 1, oracle_grid_step >= 1");
  }
  SolveResult result;
  auto& diag = result.diagnostics;
  for (const auto& v : validate_instance(g)) {
    if (v.code != "xi_exceeds_phi") throw PreconditionError("invalid instance: " + v.message);
    diag.violations.push_back(v.code + ": " + v.message);
  }

  const PotentialTerms t(g);
  const std::size_t size = g.orgs.size();
  const double midpoint = 0.5 * static_cast<double>(g.mech.d_min + g.mech.d_max);
  std::vector<double> d(size, midpoint);
  double f_prev = potential_with(g, t, d);
  diag.potential_trace.push_back(f_prev);

  for (int k = 1; k <= settings.k_max; ++k) {
    auto next = iterate_once(g, t, d);
    const double f_next = potential_with(g, t, next);
    diag.potential_trace.push_back(f_next);
    diag.iterations = k;
    const bool stop = settings.stop_rule == StopRule::PotentialChange
                          ? std::abs(f_next - f_prev) <= settings.eps_tol
                          : max_abs_diff(next, d) <= settings.iterate_tol;
    d = std::move(next);
    f_prev = f_next;
    if (stop) {
      diag.converged = true;
      break;
    }
  }

  // The potential is flat near its minimum, so a small change in F can leave
  // the iterate ~1e-4 samples from the fixed point. Polish it.
  if (diag.converged) {
    for (int k = 0; k < kPolishSweeps; ++k) {
      auto next = iterate_once(g, t, d);
      const double change = max_abs_diff(next, d);
      d = std::move(next);
      ++diag.polish_iterations;
      if (change <= kPolishTol) break;
    }
  }

  diag.continuous_solution = d;
  diag.case_labels.resize(size);
  diag.gradients.resize(size);
  diag.foc_residuals.assign(size, 0.0);
  for (std::size_t n = 0; n < size; ++n) {
    diag.case_labels[n] = classify_with(g, t, d, n);
    diag.gradients[n] = gradient_with(g, t, d, n);
    if (diag.case_labels[n] == BoundCase::Interior) diag.foc_residuals[n] = diag.gradients[n];
  }

  result.profile = round_profile(g, t, d);

  const auto breakdowns = utilities(g, result.profile);
  diag.ir_pass.resize(size);
  for (std::size_t n = 0; n < size; ++n) {
    diag.ir_pass[n] = breakdowns[n].utility >= 0.0;
    if (!diag.ir_pass[n]) {
      std::ostringstream msg;
      msg << "ir: organization " << n << " has negative utility " << breakdowns[n].utility;
      diag.violations.push_back(msg.str());
    }
  }
  diag.budget_residual = settle(g, result.profile).total();
  if (std::abs(diag.budget_residual) > 1e-12) {
    std::ostringstream msg;
    msg << "budget: settlement nets sum to " << diag.budget_residual;
    diag.violations.push_back(msg.str());
  }
  return result;
}

double oracle_grid_size(const GameInstance& g, std::int64_t grid_step) {
  if (grid_step < 1) throw PreconditionError("grid step must be at least 1");
  const double per_org = static_cast<double>((g.mech.d_max - g.mech.d_min) / grid_step + 1);
  return std::pow(per_org, static_cast<double>(g.orgs.size()));
}

StrategyProfile brute_force_oracle(const GameInstance& g, std::int64_t grid_step) {
  const double count = oracle_grid_size(g, grid_step);
  const std::size_t size = g.orgs.size();
  if ((size > 3 && count > 1e7) || count > 1e9) {
    std::ostringstream msg;
    msg << "brute-force grid too large: " << count << " points for " << size
        << " organizations (limit 1e7 beyond 3 organizations)";
    throw PreconditionError(msg.str());
  }
  const PotentialTerms t(g);
  const auto per_org = static_cast<std::size_t>((g.mech.d_max - g.mech.d_min) / grid_step + 1);

  // Tabulate each organization's error and cost contribution once.
  std::vector<std::vector<double>> eps(size, std::vector<double>(per_org));
  std::vector<std::vector<double>> cost(size, std::vector<double>(per_org));
  for (std::size_t n = 0; n < size; ++n) {
    for (std::size_t k = 0; k < per_org; ++k) {
      const double v = static_cast<double>(g.mech.d_min + static_cast<std::int64_t>(k) * grid_step);
      eps[n][k] = local_error(g.orgs[n].law, t.d_loc[n] + v);
      cost[n][k] = -t.a2[n] * v;
    }
  }

  const double inv_n = 1.0 / static_cast<double>(size);
  const double varrho = g.mech.varrho;
  const std::size_t last = size - 1;
  std::vector<std::size_t> idx(size, 0), best(size, 0);
  double best_f = INFINITY;
  for (;;) {
    double pe = 0.0, pc = 0.0;
    for (std::size_t n = 0; n < last; ++n) {
      pe += eps[n][idx[n]];
      pc += cost[n][idx[n]];
    }
    const auto& el = eps[last];
    const auto& cl = cost[last];
    for (std::size_t k = 0; k < per_org; ++k) {
      const double f = std::exp(((pe + el[k]) * inv_n - 1.0) / varrho) + (pc + cl[k]);
      if (f < best_f) {
        best_f = f;
        std::copy(idx.begin(), idx.end(), best.begin());
        best[last] = k;
      }
    }
    // Odometer over the leading coordinates.
    bool exhausted = true;
    for (std::size_t pos = last; pos-- > 0;) {
      if (++idx[pos] < per_org) {
        exhausted = false;
        break;
      }
      idx[pos] = 0;
    }
    if (exhausted) break;
  }

  StrategyProfile s;
  for (std::size_t n = 0; n < size; ++n)
    s.d_gen.push_back(g.mech.d_min + static_cast<std::int64_t>(best[n]) * grid_step);
  return s;
}

}  // namespace coopgen
