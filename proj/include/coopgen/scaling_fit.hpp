#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "coopgen/model.hpp"

namespace coopgen {

struct LossObservation {
  double d_total = 1.0;
  double loss = 0.0;
  std::string tag;
};

struct FitResult {
  ScalingLaw law;
  double sse = 0.0;
  double r2 = 0.0;
  std::size_t n_points = 0;
};

/// Least-squares fit of loss ~ alpha * d^(-beta) - delta.
///
/// delta is searched on [0, min loss]; for each candidate, (log alpha, -beta)
/// come from a closed-form regression of log(loss + delta) on log d over the
/// points with loss + delta > 0. A candidate that drops more than 20% of the
/// points, or yields beta <= 0, is inadmissible. The search is a uniform scan
/// followed by golden-section refinement (1e-9) around the best scan point.
///
/// Throws PreconditionError for fewer than 3 distinct sizes or non-finite
/// input, and DomainError when the losses are all equal or no admissible
/// candidate exists.
FitResult fit_power_law(std::span<const LossObservation> obs);

/// Sum of squared residuals of `law` on `obs`, and the SSE the fitter would
/// report for a fixed delta (inner regression re-solved). Exposed for tests.
double sum_squared_error(const ScalingLaw& law, std::span<const LossObservation> obs);
double profile_sse(std::span<const LossObservation> obs, double delta);

/// Same surrogate as local_error().
double predict(const ScalingLaw& law, double d_total);

/// Parses `d_total,loss[,tag]` CSV (header required). Untagged rows get tag
/// "default". Throws ConfigError naming the 1-based file line on bad rows.
std::map<std::string, std::vector<LossObservation>> read_loss_csv(std::istream& in);

using TaggedFit = std::variant<FitResult, std::string>;  // result or error message

/// Fits every tag independently; a failing tag does not abort the others.
std::map<std::string, TaggedFit> fit_by_tag(const std::map<std::string, std::vector<LossObservation>>& groups);

}  // namespace coopgen
