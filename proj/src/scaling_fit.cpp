#include "coopgen/scaling_fit.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "coopgen/economics.hpp"
#include "coopgen/errors.hpp"

namespace coopgen {

namespace {

constexpr double kInadmissible = std::numeric_limits<double>::infinity();
constexpr double kMaxExcludedFraction = 0.2;
constexpr int kScanPoints = 64;
constexpr double kGoldenTol = 1e-9;

struct Candidate {
  ScalingLaw law;
  double sse = kInadmissible;
};

// Inner closed-form regression for a fixed delta.
Candidate fit_at(std::span<const LossObservation> obs, double delta) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (const auto& o : obs) {
    const double shifted = o.loss + delta;
    if (!(shifted > 0.0)) continue;
    const double x = std::log(o.d_total);
    const double y = std::log(shifted);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  const auto excluded = obs.size() - used;
  if (used < 2 || static_cast<double>(excluded) > kMaxExcludedFraction * static_cast<double>(obs.size()))
    return {};
  const double m = static_cast<double>(used);
  const double denom = m * sxx - sx * sx;
  if (!(denom > 0.0)) return {};
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  Candidate c;
  c.law = {std::exp(intercept), -slope, delta};
  if (!(c.law.beta > 0.0) || !(c.law.alpha > 0.0) || !std::isfinite(c.law.alpha)) return {};
  c.sse = sum_squared_error(c.law, obs);
  return c;
}

void check_observations(std::span<const LossObservation> obs) {
  std::set<double> sizes;
  for (const auto& o : obs) {
    if (!std::isfinite(o.d_total) || !std::isfinite(o.loss))
      throw PreconditionError("observations must be finite");
    if (o.d_total < 1.0) throw PreconditionError("observation d_total must be at least 1");
    if (o.loss < 0.0) throw PreconditionError("observation loss must be non-negative");
    sizes.insert(o.d_total);
  }
  if (sizes.size() < 3) {
    throw PreconditionError("insufficient distinct sizes: need at least 3, got " +
                            std::to_string(sizes.size()));
  }
}

}  // namespace

double sum_squared_error(const ScalingLaw& law, std::span<const LossObservation> obs) {
  double sse = 0.0;
  for (const auto& o : obs) {
    const double r = predict(law, o.d_total) - o.loss;
    sse += r * r;
  }
  return sse;
}

double profile_sse(std::span<const LossObservation> obs, double delta) {
  return fit_at(obs, delta).sse;
}

double predict(const ScalingLaw& law, double d_total) { return local_error(law, d_total); }

FitResult fit_power_law(std::span<const LossObservation> obs) {
  check_observations(obs);
  const auto [lo_it, hi_it] = std::minmax_element(
      obs.begin(), obs.end(), [](const auto& a, const auto& b) { return a.loss < b.loss; });
  if (lo_it->loss == hi_it->loss)
    throw DomainError("degenerate input: all losses are equal, beta is unidentifiable");
  const double upper = lo_it->loss;

  Candidate best;
  std::size_t best_k = 0;
  for (int k = 0; k <= kScanPoints; ++k) {
    const double delta = upper * static_cast<double>(k) / kScanPoints;
    auto c = fit_at(obs, delta);
    if (c.sse < best.sse) {
      best = c;
      best_k = static_cast<std::size_t>(k);
    }
  }
  if (!std::isfinite(best.sse)) throw DomainError("no admissible power-law fit for these observations");

  if (upper > 0.0) {
    double a = upper * static_cast<double>(best_k == 0 ? 0 : best_k - 1) / kScanPoints;
    double b = upper * static_cast<double>(std::min<std::size_t>(best_k + 1, kScanPoints)) / kScanPoints;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = profile_sse(obs, c);
    double fd = profile_sse(obs, d);
    while (b - a > kGoldenTol) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = profile_sse(obs, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = profile_sse(obs, d);
      }
    }
    auto refined = fit_at(obs, 0.5 * (a + b));
    if (refined.sse < best.sse) best = refined;
  }

  double mean = 0.0;
  for (const auto& o : obs) mean += o.loss;
  mean /= static_cast<double>(obs.size());
  double sst = 0.0;
  for (const auto& o : obs) sst += (o.loss - mean) * (o.loss - mean);

  FitResult out;
  out.law = best.law;
  out.sse = best.sse;
  out.r2 = 1.0 - best.sse / sst;
  out.n_points = obs.size();
  return out;
}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

std::map<std::string, std::vector<LossObservation>> read_loss_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) -> ConfigError {
    return ConfigError("row " + std::to_string(line_no) + ": " + why);
  };

  if (!std::getline(in, line)) throw ConfigError("row 1: empty file, expected header d_total,loss[,tag]");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_commas(line);
  const bool tagged = header.size() == 3 && header[2] == "tag";
  if (!(header.size() >= 2 && header[0] == "d_total" && header[1] == "loss" &&
        (header.size() == 2 || tagged))) {
    throw fail("expected header d_total,loss[,tag]");
  }

  std::map<std::string, std::vector<LossObservation>> groups;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw fail("expected " + std::to_string(header.size()) + " fields, got " +
                 std::to_string(fields.size()));
    }
    LossObservation o;
    if (!parse_double(fields[0], o.d_total) || o.d_total < 1.0)
      throw fail("d_total '" + fields[0] + "' is not a number >= 1");
    if (!parse_double(fields[1], o.loss) || o.loss < 0.0)
      throw fail("loss '" + fields[1] + "' is not a finite number >= 0");
    o.tag = tagged && !fields[2].empty() ? fields[2] : "default";
    groups[o.tag].push_back(std::move(o));
  }
  return groups;
}

std::map<std::string, TaggedFit> fit_by_tag(
    const std::map<std::string, std::vector<LossObservation>>& groups) {
  std::map<std::string, TaggedFit> out;
  for (const auto& [tag, obs] : groups) {
    try {
      out.emplace(tag, fit_power_law(obs));
    } catch (const Error& e) {
      out.emplace(tag, std::string(e.what()));
    }
  }
  return out;
}

}  // namespace coopgen
