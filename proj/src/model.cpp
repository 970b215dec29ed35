#include "coopgen/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coopgen/equilibrium.hpp"
#include "coopgen/errors.hpp"
#include "coopgen/random.hpp"

namespace coopgen {

CompetitionMatrix::CompetitionMatrix(const std::vector<std::vector<double>>& rows)
    : n_(rows.size()), values_(rows.size() * rows.size(), 0.0) {
  for (std::size_t i = 0; i < n_; ++i) {
    if (rows[i].size() != n_) {
      throw PreconditionError("competition matrix row " + std::to_string(i) + " has " +
                              std::to_string(rows[i].size()) + " entries, expected " +
                              std::to_string(n_));
    }
    for (std::size_t j = 0; j < n_; ++j) (*this)(i, j) = rows[i][j];
  }
}

bool CompetitionMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

double CompetitionMatrix::mean_off_diagonal() const {
  if (n_ < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j) sum += (*this)(i, j);
  return sum / static_cast<double>(n_ * (n_ - 1));
}

std::vector<std::vector<double>> CompetitionMatrix::rows() const {
  std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

GameInstance GameInstance::without_competition() const {
  GameInstance copy = *this;
  copy.comp = CompetitionMatrix::zeros(orgs.size());
  return copy;
}

GameInstance GameInstance::with_xi(double xi) const {
  GameInstance copy = *this;
  copy.mech.xi = xi;
  return copy;
}

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

class Collector {
 public:
  void add(std::string code, std::string message, std::optional<std::size_t> org = std::nullopt) {
    out_.push_back({std::move(code), std::move(message), org});
  }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

std::string org_field(std::size_t n, const char* field) {
  return "organization " + std::to_string(n) + ": " + field;
}

}  // namespace

std::vector<Violation> validate_instance(const GameInstance& g) {
  Collector found;
  const std::size_t n_orgs = g.orgs.size();
  if (n_orgs < 2) found.add("too_few_orgs", "at least 2 organizations are required");

  bool orgs_ok = true;
  for (std::size_t n = 0; n < n_orgs; ++n) {
    const auto& o = g.orgs[n];
    auto require = [&](bool ok, const char* field, const char* rule) {
      if (!ok) {
        orgs_ok = false;
        found.add("invalid_field", org_field(n, field) + std::string(" must be ") + rule, n);
      }
    };
    require(o.d_loc >= 0, "d_loc", "non-negative");
    require(positive(o.freq), "freq", "positive");
    require(positive(o.kappa), "kappa", "positive");
    require(positive(o.eta), "eta", "positive");
    require(positive(o.mu), "mu", "positive");
    require(non_negative(o.cost_per_joule), "cost_per_joule", "non-negative");
    require(non_negative(o.psi), "psi", "non-negative");
    require(non_negative(o.phi), "phi", "non-negative");
    require(positive(o.law.alpha), "law.alpha", "positive");
    require(positive(o.law.beta), "law.beta", "positive");
    require(non_negative(o.law.delta), "law.delta", "non-negative");
  }

  const auto& m = g.mech;
  bool mech_ok = true;
  auto require_mech = [&](bool ok, const std::string& msg) {
    if (!ok) {
      mech_ok = false;
      found.add("invalid_mechanism", msg);
    }
  };
  require_mech(non_negative(m.xi), "xi must be non-negative");
  require_mech(std::isfinite(m.epsilon0) && m.epsilon0 > 0.0 && m.epsilon0 <= 1.0,
               "epsilon0 must lie in (0, 1]");
  require_mech(positive(m.varrho), "varrho must be positive");
  require_mech(non_negative(m.c0), "c0 must be non-negative");
  require_mech(m.d_min >= 0, "d_min must be non-negative");
  require_mech(m.d_min < m.d_max, "d_min must be smaller than d_max");

  bool comp_ok = true;
  if (g.comp.size() != n_orgs) {
    comp_ok = false;
    found.add("size_mismatch", "competition matrix is " + std::to_string(g.comp.size()) + "x" +
                                   std::to_string(g.comp.size()) + " for " +
                                   std::to_string(n_orgs) + " organizations");
  } else {
    for (std::size_t i = 0; i < n_orgs; ++i) {
      if (g.comp(i, i) != 0.0) {
        comp_ok = false;
        found.add("gamma_diagonal", "gamma[" + std::to_string(i) + "][" + std::to_string(i) +
                                        "] must be 0", i);
      }
      for (std::size_t j = 0; j < n_orgs; ++j) {
        const double v = g.comp(i, j);
        if (!(std::isfinite(v) && v >= 0.0 && v <= 1.0)) {
          comp_ok = false;
          found.add("gamma_range", "gamma[" + std::to_string(i) + "][" + std::to_string(j) +
                                       "] must lie in [0, 1]", i);
        }
        if (j > i && v != g.comp(j, i)) {
          comp_ok = false;
          found.add("gamma_asymmetric", "gamma[" + std::to_string(i) + "][" + std::to_string(j) +
                                            "] != gamma[" + std::to_string(j) + "][" +
                                            std::to_string(i) + "]", i);
        }
      }
    }
  }

  if (orgs_ok && mech_ok && n_orgs > 0) {
    const auto min_phi = std::min_element(
        g.orgs.begin(), g.orgs.end(), [](const auto& a, const auto& b) { return a.phi < b.phi; });
    if (m.xi > min_phi->phi) {
      std::ostringstream msg;
      msg << "xi exceeds phi: xi = " << m.xi << " > phi = " << min_phi->phi
          << " (organization " << (min_phi - g.orgs.begin())
          << "); the compensation rate may not exceed any rival's benefit rate";
      found.add("xi_exceeds_phi", msg.str(), static_cast<std::size_t>(min_phi - g.orgs.begin()));
    }
  }

  if (orgs_ok && mech_ok && comp_ok) {
    for (std::size_t n = 0; n < n_orgs; ++n) {
      const double z = weight_z(g, n);
      if (!(z < 0.0)) {
        std::ostringstream msg;
        msg << "z_n must be negative for organization " << n << " (z = " << z << ")";
        found.add("z_nonnegative", msg.str(), n);
      }
    }
  }
  return found.take();
}

std::string describe(std::span<const Violation> violations) {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].code << ": " << violations[i].message;
  }
  return out.str();
}

std::optional<Range> gamma_regime(std::string_view name) {
  if (name == "low") return Range{0.0, 0.2};
  if (name == "moderate") return Range{0.0, 1.0};
  if (name == "high") return Range{0.8, 1.0};
  return std::nullopt;
}

namespace {

void check_range(const Range& r, const char* name) {
  if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi)) {
    throw PreconditionError(std::string("sampling range '") + name + "' must satisfy lower <= upper");
  }
}

}  // namespace

GameInstance sample_instance(const SamplingSpec& spec, std::size_t n, const MechanismParams& mech) {
  check_range(spec.d_loc, "d_loc");
  check_range(spec.freq_ghz, "freq_ghz");
  check_range(spec.psi, "psi");
  check_range(spec.phi, "phi");
  check_range(spec.cost_per_joule, "cost_per_joule");
  check_range(spec.gamma, "gamma");
  if (spec.gamma.lo < 0.0 || spec.gamma.hi > 1.0)
    throw PreconditionError("sampling range 'gamma' must lie within [0, 1]");
  if (spec.d_loc.lo < 0.0) throw PreconditionError("sampling range 'd_loc' must be non-negative");

  Rng rng(spec.seed);
  const auto dl_lo = static_cast<std::int64_t>(std::ceil(spec.d_loc.lo));
  const auto dl_hi = static_cast<std::int64_t>(std::floor(spec.d_loc.hi));
  if (dl_lo > dl_hi) throw PreconditionError("sampling range 'd_loc' contains no integer");

  std::string last_failure;
  for (int attempt = 0; attempt < kSamplingRetries; ++attempt) {
    GameInstance g;
    g.mech = mech;
    g.orgs.resize(n);
    for (auto& o : g.orgs) {
      o.d_loc = rng.uniform_int(dl_lo, dl_hi);
      o.freq = rng.uniform(spec.freq_ghz.lo, spec.freq_ghz.hi) * 1e9;
      o.psi = rng.uniform(spec.psi.lo, spec.psi.hi);
      o.phi = rng.uniform(spec.phi.lo, spec.phi.hi);
      o.cost_per_joule = rng.uniform(spec.cost_per_joule.lo, spec.cost_per_joule.hi);
      o.kappa = spec.kappa;
      o.eta = spec.eta;
      o.mu = spec.mu;
      o.law = spec.law;
    }
    g.comp = CompetitionMatrix(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        g.comp.set_pair(i, j, rng.uniform(spec.gamma.lo, spec.gamma.hi));

    const auto violations = validate_instance(g);
    if (violations.empty()) return g;
    last_failure = describe(violations);
  }
  throw Error("sampling gave up after " + std::to_string(kSamplingRetries) +
              " attempts; last failure: " + last_failure);
}

const std::vector<NamedLaw>& scaling_presets() {
  static const std::vector<NamedLaw> presets = {
      {"simple@0.9", {0.8, 0.32, 0.02}},  {"simple@0.5", {0.9, 0.31, 0.02}},
      {"simple@0.1", {1.0, 0.30, 0.02}},  {"medium@0.9", {1.1, 0.28, 0.03}},
      {"medium@0.5", {1.2, 0.27, 0.03}},  {"medium@0.1", {1.3, 0.26, 0.03}},
      {"complex@0.9", {1.4, 0.24, 0.05}}, {"complex@0.5", {1.5, 0.23, 0.05}},
      {"complex@0.1", {1.6, 0.22, 0.05}},
  };
  return presets;
}

std::optional<ScalingLaw> find_preset(std::string_view name) {
  for (const auto& p : scaling_presets())
    if (p.name == name) return p.law;
  return std::nullopt;
}

}  // namespace coopgen
