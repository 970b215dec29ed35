#include "coopgen/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "coopgen/errors.hpp"

namespace coopgen {

using nlohmann::json;

namespace {

// Walks a JSON object, remembering the path for error messages and which keys
// were consumed so leftovers can be rejected.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  std::string child(const std::string& key) const { return path_ + "/" + key; }

  double number(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number()) throw ConfigError(child(key) + ": expected a number");
    return v.get<double>();
  }

  std::optional<double> number_opt(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::int64_t integer(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(child(key) + ": expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const auto& v = raw(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(child(key) + ": expected a non-negative integer");
  }

  std::string string(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(child(key) + ": expected a string");
    return v.get<std::string>();
  }

  Range range(const std::string& key) {
    const auto& v = raw(key);
    if (!(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()))
      throw ConfigError(child(key) + ": expected [lower, upper]");
    Range r{v[0].get<double>(), v[1].get<double>()};
    if (!(r.lo <= r.hi)) throw ConfigError(child(key) + ": lower bound exceeds upper bound");
    return r;
  }

  template <typename T, typename Fn>
  std::vector<T> list(const std::string& key, Fn&& item) {
    const auto& v = raw(key);
    if (!v.is_array()) throw ConfigError(child(key) + ": expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(item(v[i], child(key) + "/" + std::to_string(i)));
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) throw ConfigError(child(key) + ": unknown key");
    }
  }

  const std::string& path() const { return path_; }
  std::string where() const { return path_.empty() ? "/" : path_; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

ScalingLaw read_law(Reader& r) {
  const bool has_law = r.has("law"), has_preset = r.has("preset");
  if (has_law && has_preset) throw ConfigError(r.where() + ": give either 'law' or 'preset', not both");
  if (has_preset) {
    const auto name = r.string("preset");
    auto law = find_preset(name);
    if (!law) throw ConfigError(r.child("preset") + ": unknown preset '" + name + "'");
    return *law;
  }
  if (!has_law) throw ConfigError(r.where() + ": missing 'law' or 'preset'");
  Reader l(r.raw("law"), r.child("law"));
  ScalingLaw law{l.number("alpha"), l.number("beta"), l.number("delta")};
  l.finish();
  return law;
}

double read_freq(Reader& r) {
  const bool hz = r.has("freq_hz"), ghz = r.has("freq_ghz");
  if (hz == ghz) throw ConfigError(r.where() + ": give exactly one of 'freq_hz' or 'freq_ghz'");
  return hz ? r.number("freq_hz") : r.number("freq_ghz") * 1e9;
}

OrganizationProfile read_org(const json& node, const std::string& path) {
  Reader r(node, path);
  OrganizationProfile o;
  o.d_loc = r.integer("d_loc");
  o.freq = read_freq(r);
  o.kappa = r.number_opt("kappa").value_or(o.kappa);
  o.eta = r.number_opt("eta").value_or(o.eta);
  o.mu = r.number_opt("mu").value_or(o.mu);
  o.cost_per_joule = r.number("cost_per_joule");
  o.psi = r.number("psi");
  o.phi = r.number("phi");
  o.law = read_law(r);
  r.finish();
  return o;
}

SamplingSpec read_sampling(Reader& r, std::size_t& n_orgs) {
  SamplingSpec s;
  if (r.has("seed")) s.seed = r.unsigned_integer("seed");
  if (r.has("n")) {
    const auto n = r.integer("n");
    if (n < 2) throw ConfigError(r.child("n") + ": need at least 2 organizations");
    n_orgs = static_cast<std::size_t>(n);
  }
  if (r.has("d_loc")) s.d_loc = r.range("d_loc");
  if (r.has("freq_ghz")) s.freq_ghz = r.range("freq_ghz");
  if (r.has("psi")) s.psi = r.range("psi");
  if (r.has("phi")) s.phi = r.range("phi");
  if (r.has("cost_per_joule")) s.cost_per_joule = r.range("cost_per_joule");
  s.kappa = r.number_opt("kappa").value_or(s.kappa);
  s.eta = r.number_opt("eta").value_or(s.eta);
  s.mu = r.number_opt("mu").value_or(s.mu);
  if (r.has("law") || r.has("preset")) s.law = read_law(r);
  r.finish();
  return s;
}

std::string read_regime_name(Reader& r, const std::string& key) {
  const auto name = r.string(key);
  if (!gamma_regime(name)) throw ConfigError(r.child(key) + ": unknown regime '" + name + "' (low, moderate, high)");
  return name;
}

void read_competition(Reader& r, Config& cfg) {
  const int forms = int(r.has("matrix")) + int(r.has("regime")) + int(r.has("range"));
  if (forms != 1) throw ConfigError(r.where() + ": give exactly one of 'matrix', 'regime', 'range'");
  if (r.has("matrix")) {
    auto rows = r.list<std::vector<double>>("matrix", [](const json& row, const std::string& p) {
      if (!row.is_array()) throw ConfigError(p + ": expected an array");
      std::vector<double> out;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (!row[j].is_number()) throw ConfigError(p + "/" + std::to_string(j) + ": expected a number");
        out.push_back(row[j].get<double>());
      }
      return out;
    });
    try {
      cfg.matrix = CompetitionMatrix(rows);
    } catch (const Error& e) {
      throw ConfigError(r.child("matrix") + ": " + e.what());
    }
  } else if (r.has("regime")) {
    cfg.regime = read_regime_name(r, "regime");
    cfg.gamma_range = gamma_regime(*cfg.regime);
  } else {
    cfg.gamma_range = r.range("range");
  }
  r.finish();
}

void read_mechanism(Reader& r, Config& cfg) {
  cfg.xi = r.number_opt("xi");
  cfg.mech.epsilon0 = r.number_opt("epsilon0").value_or(cfg.mech.epsilon0);
  cfg.mech.varrho = r.number_opt("varrho").value_or(cfg.mech.varrho);
  cfg.mech.c0 = r.number_opt("c0").value_or(cfg.mech.c0);
  if (r.has("d_min")) cfg.mech.d_min = r.integer("d_min");
  if (r.has("d_max")) cfg.mech.d_max = r.integer("d_max");
  if (cfg.xi) cfg.mech.xi = *cfg.xi;
  r.finish();
}

void read_solver(Reader& r, SolverSettings& s) {
  s.eps_tol = r.number_opt("eps_tol").value_or(s.eps_tol);
  if (r.has("k_max")) s.k_max = static_cast<int>(r.integer("k_max"));
  if (r.has("oracle_grid_step")) s.oracle_grid_step = r.integer("oracle_grid_step");
  s.iterate_tol = r.number_opt("iterate_tol").value_or(s.iterate_tol);
  if (r.has("stop_rule")) {
    const auto rule = r.string("stop_rule");
    if (rule == "potential-change") s.stop_rule = StopRule::PotentialChange;
    else if (rule == "iterate-change") s.stop_rule = StopRule::IterateChange;
    else throw ConfigError(r.child("stop_rule") + ": expected 'potential-change' or 'iterate-change'");
  }
  if (!(s.eps_tol > 0.0) || s.k_max < 1 || s.oracle_grid_step < 1 || !(s.iterate_tol > 0.0))
    throw ConfigError(r.where() + ": need eps_tol > 0, iterate_tol > 0, k_max >= 1, oracle_grid_step >= 1");
  r.finish();
}

SweepSpec read_sweep(Reader& r) {
  SweepSpec s;
  auto strings = [](const json& v, const std::string& p) {
    if (!v.is_string()) throw ConfigError(p + ": expected a string");
    return v.get<std::string>();
  };
  if (r.has("gamma_regimes")) {
    s.gamma_regimes = r.list<std::string>("gamma_regimes", [&](const json& v, const std::string& p) {
      auto name = strings(v, p);
      if (!gamma_regime(name)) throw ConfigError(p + ": unknown regime '" + name + "'");
      return name;
    });
  }
  if (r.has("presets")) {
    s.presets = r.list<std::string>("presets", [&](const json& v, const std::string& p) {
      auto name = strings(v, p);
      if (!find_preset(name)) throw ConfigError(p + ": unknown preset '" + name + "'");
      return name;
    });
  }
  s.xi_grid = r.list<double>("xi_grid", [](const json& v, const std::string& p) {
    if (!v.is_number()) throw ConfigError(p + ": expected a number");
    return v.get<double>();
  });
  s.methods = r.list<Method>("methods", [&](const json& v, const std::string& p) {
    auto name = strings(v, p);
    auto m = parse_method(name);
    if (!m) throw ConfigError(p + ": unknown method '" + name + "'");
    return *m;
  });
  if (r.has("seeds")) {
    s.seeds = r.list<std::uint64_t>("seeds", [](const json& v, const std::string& p) {
      if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)))
        throw ConfigError(p + ": expected a non-negative integer");
      return v.get<std::uint64_t>();
    });
  }
  if (r.has("rounds")) s.rounds = static_cast<int>(r.integer("rounds"));
  if (r.has("threads")) s.threads = static_cast<unsigned>(r.unsigned_integer("threads"));
  r.finish();

  const auto empty = [&](const char* what) { return ConfigError(r.where() + ": '" + what + "' must not be empty"); };
  if (s.gamma_regimes.empty()) throw empty("gamma_regimes");
  if (s.presets.empty()) throw empty("presets");
  if (s.xi_grid.empty()) throw empty("xi_grid");
  if (s.methods.empty()) throw empty("methods");
  if (s.seeds.empty()) throw empty("seeds");
  if (s.rounds < 1) throw ConfigError(r.child("rounds") + ": must be at least 1");
  return s;
}

}  // namespace

Config parse_config(const json& doc) {
  Reader root(doc, "");
  Config cfg;
  const bool explicit_orgs = root.has("organizations"), sampled = root.has("sampling");
  if (explicit_orgs == sampled)
    throw ConfigError("/: give exactly one of 'organizations' or 'sampling'");
  if (explicit_orgs) {
    cfg.organizations = root.list<OrganizationProfile>("organizations", read_org);
    if (cfg.organizations->size() < 2) throw ConfigError("/organizations: need at least 2 organizations");
  } else {
    Reader s(root.raw("sampling"), "/sampling");
    cfg.sampling = read_sampling(s, cfg.n_orgs);
  }
  if (root.has("competition")) {
    Reader c(root.raw("competition"), "/competition");
    read_competition(c, cfg);
  }
  if (root.has("mechanism")) {
    Reader m(root.raw("mechanism"), "/mechanism");
    read_mechanism(m, cfg);
  }
  if (root.has("solver")) {
    Reader s(root.raw("solver"), "/solver");
    read_solver(s, cfg.solver);
  }
  if (root.has("sweep")) {
    Reader s(root.raw("sweep"), "/sweep");
    cfg.sweep = read_sweep(s);
  }
  root.finish();

  if (cfg.organizations) {
    if (!cfg.matrix) throw ConfigError("/competition/matrix: required with explicit organizations");
    if (cfg.matrix->size() != cfg.organizations->size()) {
      throw ConfigError("/competition/matrix: is " + std::to_string(cfg.matrix->size()) + "x" +
                        std::to_string(cfg.matrix->size()) + " for " +
                        std::to_string(cfg.organizations->size()) + " organizations");
    }
  }
  return cfg;
}

Config parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line number
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError("line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
  return parse_config(doc);
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

GameInstance build_instance(const Config& cfg, std::optional<std::uint64_t> seed_override) {
  if (!cfg.xi) throw ConfigError("/mechanism/xi: required (the compensation rate is always explicit)");
  if (cfg.organizations) {
    GameInstance g;
    g.orgs = *cfg.organizations;
    g.comp = *cfg.matrix;
    g.mech = cfg.mech;
    return g;
  }
  SamplingSpec spec = *cfg.sampling;
  if (seed_override) spec.seed = *seed_override;
  spec.gamma = cfg.gamma_range.value_or(*gamma_regime("moderate"));
  GameInstance g;
  try {
    g = sample_instance(spec, cfg.n_orgs, cfg.mech);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("/sampling: ") + e.what());
  }
  if (cfg.matrix) {
    if (cfg.matrix->size() != g.size()) throw ConfigError("/competition/matrix: size does not match /sampling/n");
    g.comp = *cfg.matrix;
  }
  return g;
}

SweepSpec build_sweep(const Config& cfg, std::optional<std::uint64_t> seed_override) {
  if (!cfg.sweep) throw ConfigError("/sweep: required for the sweep command");
  if (!cfg.sampling) throw ConfigError("/sampling: the sweep command samples its instances");
  SweepSpec spec = *cfg.sweep;
  spec.sampling = *cfg.sampling;
  spec.n_orgs = cfg.n_orgs;
  spec.mech = cfg.mech;
  spec.solver = cfg.solver;
  if (seed_override) spec.seeds = {*seed_override};
  return spec;
}

json effective_config(const GameInstance& g, const SolverSettings& solver) {
  json orgs = json::array();
  for (const auto& o : g.orgs) {
    orgs.push_back({{"d_loc", o.d_loc},
                    {"freq_hz", o.freq},
                    {"kappa", o.kappa},
                    {"eta", o.eta},
                    {"mu", o.mu},
                    {"cost_per_joule", o.cost_per_joule},
                    {"psi", o.psi},
                    {"phi", o.phi},
                    {"law", {{"alpha", o.law.alpha}, {"beta", o.law.beta}, {"delta", o.law.delta}}}});
  }
  const auto& m = g.mech;
  return json{{"organizations", orgs},
              {"competition", {{"matrix", g.comp.rows()}}},
              {"mechanism",
               {{"xi", m.xi}, {"epsilon0", m.epsilon0}, {"varrho", m.varrho}, {"c0", m.c0},
                {"d_min", m.d_min}, {"d_max", m.d_max}}},
              {"solver",
               {{"eps_tol", solver.eps_tol}, {"k_max", solver.k_max},
                {"oracle_grid_step", solver.oracle_grid_step},
                {"stop_rule", to_string(solver.stop_rule)}, {"iterate_tol", solver.iterate_tol}}}};
}

}  // namespace coopgen
