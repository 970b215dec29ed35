#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coopgen/config.hpp"
#include "coopgen/economics.hpp"
#include "coopgen/equilibrium.hpp"
#include "coopgen/errors.hpp"
#include "coopgen/report_io.hpp"
#include "coopgen/scaling_fit.hpp"
#include "coopgen/simulation.hpp"

namespace py = pybind11;
using namespace coopgen;

namespace {

using Vec = std::vector<double>;

std::vector<std::pair<std::string, std::string>> violations_of(const GameInstance& g) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& v : validate_instance(g)) out.emplace_back(v.code, v.message);
  return out;
}

GameInstance instance_from_json(const std::string& text, std::optional<std::uint64_t> seed) {
  return build_instance(parse_config_text(text), seed);
}

FitResult fit_lists(const Vec& d_total, const Vec& loss) {
  if (d_total.size() != loss.size()) throw PreconditionError("d_total and loss differ in length");
  std::vector<LossObservation> obs;
  for (std::size_t i = 0; i < d_total.size(); ++i) obs.push_back({d_total[i], loss[i], ""});
  return fit_power_law(obs);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Equilibrium engine for synthetic-data generation in cross-silo federated learning";

  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", error);
  py::register_exception<PreconditionError>(m, "PreconditionError", error);
  py::register_exception<InstanceError>(m, "InstanceError", error);
  py::register_exception<ConfigError>(m, "ConfigError", error);

  py::class_<ScalingLaw>(m, "ScalingLaw")
      .def(py::init<>())
      .def(py::init([](double a, double b, double d) { return ScalingLaw{a, b, d}; }), py::arg("alpha"),
           py::arg("beta"), py::arg("delta"))
      .def_readwrite("alpha", &ScalingLaw::alpha)
      .def_readwrite("beta", &ScalingLaw::beta)
      .def_readwrite("delta", &ScalingLaw::delta)
      .def("__repr__", [](const ScalingLaw& l) {
        return "ScalingLaw(alpha=" + format_double(l.alpha) + ", beta=" + format_double(l.beta) +
               ", delta=" + format_double(l.delta) + ")";
      });

  py::class_<OrganizationProfile>(m, "OrganizationProfile")
      .def(py::init<>())
      .def_readwrite("d_loc", &OrganizationProfile::d_loc)
      .def_readwrite("freq", &OrganizationProfile::freq)
      .def_readwrite("kappa", &OrganizationProfile::kappa)
      .def_readwrite("eta", &OrganizationProfile::eta)
      .def_readwrite("mu", &OrganizationProfile::mu)
      .def_readwrite("cost_per_joule", &OrganizationProfile::cost_per_joule)
      .def_readwrite("psi", &OrganizationProfile::psi)
      .def_readwrite("phi", &OrganizationProfile::phi)
      .def_readwrite("law", &OrganizationProfile::law);

  py::class_<CompetitionMatrix>(m, "CompetitionMatrix")
      .def(py::init<const std::vector<Vec>&>(), py::arg("rows"))
      .def("size", &CompetitionMatrix::size)
      .def("rows", &CompetitionMatrix::rows)
      .def("is_symmetric", &CompetitionMatrix::is_symmetric)
      .def("mean_off_diagonal", &CompetitionMatrix::mean_off_diagonal)
      .def("__getitem__", [](const CompetitionMatrix& c, std::pair<std::size_t, std::size_t> ij) {
        if (ij.first >= c.size() || ij.second >= c.size()) throw py::index_error();
        return c(ij.first, ij.second);
      });

  py::class_<MechanismParams>(m, "MechanismParams")
      .def(py::init<>())
      .def_readwrite("xi", &MechanismParams::xi)
      .def_readwrite("epsilon0", &MechanismParams::epsilon0)
      .def_readwrite("varrho", &MechanismParams::varrho)
      .def_readwrite("c0", &MechanismParams::c0)
      .def_readwrite("d_min", &MechanismParams::d_min)
      .def_readwrite("d_max", &MechanismParams::d_max);

  py::class_<GameInstance>(m, "GameInstance")
      .def(py::init([](std::vector<OrganizationProfile> orgs, CompetitionMatrix comp, MechanismParams mech) {
             return GameInstance{std::move(orgs), std::move(comp), mech};
           }),
           py::arg("orgs"), py::arg("competition"), py::arg("mechanism") = MechanismParams{})
      .def_readwrite("orgs", &GameInstance::orgs)
      .def_readwrite("competition", &GameInstance::comp)
      .def_readwrite("mechanism", &GameInstance::mech)
      .def("size", &GameInstance::size)
      .def("without_competition", &GameInstance::without_competition)
      .def("with_xi", &GameInstance::with_xi)
      .def("__len__", &GameInstance::size);

  py::class_<SamplingSpec>(m, "SamplingSpec")
      .def(py::init<>())
      .def_readwrite("seed", &SamplingSpec::seed)
      .def_readwrite("law", &SamplingSpec::law)
      .def_property(
          "gamma", [](const SamplingSpec& s) { return std::make_pair(s.gamma.lo, s.gamma.hi); },
          [](SamplingSpec& s, std::pair<double, double> r) { s.gamma = {r.first, r.second}; });

  py::class_<SolverSettings>(m, "SolverSettings")
      .def(py::init<>())
      .def_readwrite("eps_tol", &SolverSettings::eps_tol)
      .def_readwrite("k_max", &SolverSettings::k_max)
      .def_readwrite("oracle_grid_step", &SolverSettings::oracle_grid_step)
      .def_readwrite("iterate_tol", &SolverSettings::iterate_tol);

  py::class_<UtilityBreakdown>(m, "UtilityBreakdown")
      .def_readonly("org", &UtilityBreakdown::org)
      .def_readonly("gain", &UtilityBreakdown::gain)
      .def_readonly("redistribution", &UtilityBreakdown::redistribution)
      .def_readonly("competition_loss", &UtilityBreakdown::competition_loss)
      .def_readonly("compute_cost", &UtilityBreakdown::compute_cost)
      .def_readonly("server_fee", &UtilityBreakdown::server_fee)
      .def_readonly("utility", &UtilityBreakdown::utility)
      .def_readonly("contribution_gap", &UtilityBreakdown::contribution_gap);

  py::class_<SettlementLedger>(m, "SettlementLedger")
      .def_readonly("net", &SettlementLedger::net)
      .def("at", &SettlementLedger::at)
      .def("total", &SettlementLedger::total);

  py::class_<SolveDiagnostics>(m, "SolveDiagnostics")
      .def_readonly("iterations", &SolveDiagnostics::iterations)
      .def_readonly("converged", &SolveDiagnostics::converged)
      .def_readonly("potential_trace", &SolveDiagnostics::potential_trace)
      .def_readonly("continuous_solution", &SolveDiagnostics::continuous_solution)
      .def_readonly("gradients", &SolveDiagnostics::gradients)
      .def_readonly("ir_pass", &SolveDiagnostics::ir_pass)
      .def_readonly("violations", &SolveDiagnostics::violations)
      .def_property_readonly("case_labels", [](const SolveDiagnostics& d) {
        std::vector<std::string> out;
        for (auto c : d.case_labels) out.emplace_back(to_string(c));
        return out;
      });

  py::class_<SolveResult>(m, "SolveResult")
      .def_property_readonly("d_gen", [](const SolveResult& r) { return r.profile.d_gen; })
      .def_readonly("diagnostics", &SolveResult::diagnostics);

  py::class_<RoundReport>(m, "RoundReport")
      .def_readonly("round", &RoundReport::round)
      .def_property_readonly("method", [](const RoundReport& r) { return std::string(to_string(r.method)); })
      .def_property_readonly("d_gen", [](const RoundReport& r) { return r.strategy.d_gen; })
      .def_readonly("breakdowns", &RoundReport::breakdowns)
      .def_readonly("ledger", &RoundReport::ledger)
      .def_readonly("welfare", &RoundReport::welfare)
      .def_readonly("global_error", &RoundReport::global_err)
      .def_readonly("converged", &RoundReport::converged);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("law", &FitResult::law)
      .def_readonly("sse", &FitResult::sse)
      .def_readonly("r2", &FitResult::r2)
      .def_readonly("n_points", &FitResult::n_points);

  m.def("instance_from_json", &instance_from_json, py::arg("text"), py::arg("seed") = py::none(),
        "Build a game instance from config JSON text");
  m.def("sample_instance", &sample_instance, py::arg("spec"), py::arg("n"),
        py::arg("mechanism") = MechanismParams{});
  m.def("validate_instance", &violations_of, "List of (code, message) pairs; empty when valid");
  m.def("find_preset", &find_preset);
  m.def("preset_names", [] {
    std::vector<std::string> names;
    for (const auto& p : scaling_presets()) names.push_back(p.name);
    return names;
  });

  m.def("local_error", &local_error, py::arg("law"), py::arg("d_total"));
  m.def("global_error", [](const GameInstance& g, const Vec& d) { return global_error(g, d); });
  m.def("utilities", [](const GameInstance& g, const Vec& d) { return utilities(g, d); });
  m.def("social_welfare", [](const GameInstance& g, const Vec& d) { return social_welfare(g, d); });
  m.def("check_ir", [](const GameInstance& g, const Vec& d) { return check_ir(g, d); });
  m.def("settle", [](const GameInstance& g, const Vec& d) { return settle(g, d); });
  m.def("weight_z", &weight_z);
  m.def("potential", [](const GameInstance& g, const Vec& d) { return potential(g, d); });
  m.def("potential_gradient", [](const GameInstance& g, const Vec& d, std::size_t n) {
    return potential_gradient(g, d, n);
  });
  m.def("solve", &solve, py::arg("instance"), py::arg("settings") = SolverSettings{});
  m.def(
      "brute_force_oracle",
      [](const GameInstance& g, std::int64_t step) { return brute_force_oracle(g, step).d_gen; },
      py::arg("instance"), py::arg("grid_step") = 1);
  m.def(
      "run_round",
      [](const GameInstance& g, const std::string& method, std::uint64_t seed) {
        const auto parsed = parse_method(method);
        if (!parsed) throw PreconditionError("unknown method '" + method + "'");
        return run_round(g, *parsed, seed);
      },
      py::arg("instance"), py::arg("method") = "cocogen", py::arg("seed") = 0);
  m.def("fit_power_law", &fit_lists, py::arg("d_total"), py::arg("loss"));
}
