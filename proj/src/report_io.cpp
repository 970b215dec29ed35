#include "coopgen/report_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "coopgen/errors.hpp"

namespace coopgen {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

namespace {

std::string join(std::initializer_list<std::string> fields) {
  std::string line;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) line += ',';
    line += f;
    first = false;
  }
  line += '\n';
  return line;
}

std::string num(double v) { return format_double(v); }
std::string num(std::int64_t v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_equilibrium_csv(std::ostream& out, const GameInstance& g, const RoundReport& report) {
  out << "org,d_loc,d_gen,gain,redistribution,competition_loss,cost,utility,net_transfer\n";
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto& b = report.breakdowns[n];
    // Non-negative magnitudes, matching competition_loss()/redistribution_receipts().
    out << join({num(n + 1), num(g.orgs[n].d_loc), num(report.strategy.d_gen[n]), num(b.gain),
                 num(-b.redistribution), num(-b.competition_loss), num(b.compute_cost + b.server_fee),
                 num(b.utility), num(report.ledger.net[n])});
  }
}

json diagnostics_json(const SolveDiagnostics& d, bool with_trace) {
  json cases = json::array();
  for (auto c : d.case_labels) cases.push_back(to_string(c));
  json out{{"converged", d.converged},
           {"iterations", d.iterations},
           {"polish_iterations", d.polish_iterations},
           {"case_labels", cases},
           {"continuous_solution", d.continuous_solution},
           {"gradients", d.gradients},
           {"foc_residuals", d.foc_residuals},
           {"ir_pass", d.ir_pass},
           {"budget_residual", d.budget_residual},
           {"violations", d.violations}};
  if (!d.potential_trace.empty()) out["final_potential"] = finite_or_null(d.potential_trace.back());
  if (with_trace) out["potential_trace"] = d.potential_trace;
  return out;
}

json round_report_json(const RoundReport& r) {
  json orgs = json::array();
  for (const auto& b : r.breakdowns) {
    orgs.push_back({{"org", b.org + 1},
                    {"gain", b.gain},
                    {"redistribution", -b.redistribution},
                    {"competition_loss", -b.competition_loss},
                    {"compute_cost", b.compute_cost},
                    {"server_fee", b.server_fee},
                    {"utility", b.utility},
                    {"contribution_gap", b.contribution_gap}});
  }
  json transfers = json::array();
  for (std::size_t i = 0; i < r.ledger.n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < r.ledger.n; ++j) row.push_back(r.ledger.at(i, j));
    transfers.push_back(row);
  }
  json out{{"round", r.round},
           {"method", to_string(r.method)},
           {"competition_removed", r.competition_removed},
           {"d_gen", r.strategy.d_gen},
           {"breakdowns", orgs},
           {"ledger", {{"transfers", transfers}, {"net", r.ledger.net}}},
           {"welfare", r.welfare},
           {"global_error", r.global_err},
           {"converged", r.converged}};
  if (r.diagnostics) out["diagnostics"] = diagnostics_json(*r.diagnostics, false);
  return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "regime,preset,xi,method,seed,welfare,mean_dgen,min_utility,ir_violations,converged\n";
  for (const auto& row : result.rows) {
    const std::string head = row.regime + ',' + row.preset + ',' + num(row.xi) + ',' + to_string(row.method) +
                             ',' + std::to_string(row.seed);
    if (row.ok) {
      out << head << ',' << num(row.welfare) << ',' << num(row.mean_dgen) << ',' << num(row.min_utility) << ','
          << row.ir_violations << ',' << (row.converged ? "true" : "false") << '\n';
    } else {
      out << head << ",,,,,error\n";
    }
  }
}

void write_sweep_summary_csv(std::ostream& out, const SweepResult& result) {
  out << "regime,preset,xi,method,n_ok,n_failed,mean_welfare,min_welfare,max_welfare,mean_dgen\n";
  for (const auto& s : result.summary) {
    out << join({s.regime, s.preset, num(s.xi), to_string(s.method), num(s.n_ok), num(s.n_failed),
                 num(s.mean_welfare), num(s.min_welfare), num(s.max_welfare), num(s.mean_dgen)});
  }
}

void write_sweep_flags_csv(std::ostream& out, const SweepResult& result) {
  out << "regime,preset,xi,method,seed,status,detail\n";
  for (const auto& row : result.rows) {
    if (row.ok && row.flags.empty()) continue;
    std::string detail = row.ok ? row.flags : row.error;
    for (auto& ch : detail)
      if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
    out << join({row.regime, row.preset, num(row.xi), to_string(row.method), std::to_string(row.seed),
                 row.ok ? "flagged" : "failed", detail});
  }
}

void write_fig_gamma_dgen_csv(std::ostream& out, const SweepResult& result) {
  out << "preset,xi,regime,mean_dgen\n";
  for (const auto& s : result.summary) {
    if (s.method != Method::CoCoGen || s.n_ok == 0) continue;
    out << join({s.preset, num(s.xi), s.regime, num(s.mean_dgen)});
  }
}

void write_fig_xi_welfare_csv(std::ostream& out, const SweepResult& result) {
  out << "regime,preset,xi,mean_welfare,min_welfare,max_welfare\n";
  for (const auto& s : result.summary) {
    if (s.method != Method::CoCoGen || s.n_ok == 0) continue;
    out << join({s.regime, s.preset, num(s.xi), num(s.mean_welfare), num(s.min_welfare), num(s.max_welfare)});
  }
}

void write_fig_baselines_csv(std::ostream& out, const SweepResult& result) {
  out << "regime,preset,xi,method,mean_welfare,mean_dgen\n";
  for (const auto& s : result.summary) {
    if (s.n_ok == 0) continue;
    out << join({s.regime, s.preset, num(s.xi), to_string(s.method), num(s.mean_welfare), num(s.mean_dgen)});
  }
}

json laws_json(const std::map<std::string, TaggedFit>& fits) {
  json out = json::object();
  for (const auto& [tag, fit] : fits) {
    if (const auto* r = std::get_if<FitResult>(&fit)) {
      out[tag] = {{"alpha", r->law.alpha}, {"beta", r->law.beta}, {"delta", r->law.delta},
                  {"sse", r->sse},         {"r2", r->r2},         {"n_points", r->n_points}};
    } else {
      out[tag] = {{"error", std::get<std::string>(fit)}};
    }
  }
  return out;
}

void prepare_output_dir(const std::filesystem::path& dir, const std::vector<std::string>& files, bool force) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  if (force) return;
  for (const auto& f : files) {
    if (std::filesystem::exists(dir / f))
      throw ConfigError("refusing to overwrite '" + (dir / f).string() + "' (use --force)");
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

}  // namespace coopgen
