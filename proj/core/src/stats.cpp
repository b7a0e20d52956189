#include "typicality/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "typicality/error.hpp"
#include "typicality/types.hpp"

namespace typicality {

namespace stats {

double gaussian_log_density(double x, double mean, double variance) {
  const double diff = x - mean;
  return -0.5 * (kLogTwoPi + std::log(variance) + diff * diff / variance);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw Error("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw Error("variance needs at least two values");
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return ss / static_cast<double>(values.size() - 1);
}

double floored_variance(std::span<const double> values) {
  if (values.size() < 2) return kVarianceFloor;
  return std::max(sample_variance(values), kVarianceFloor);
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

}  // namespace stats

std::string_view model_kind_token(ModelKind kind) {
  switch (kind) {
    case ModelKind::baseline: return "baseline";
    case ModelKind::naive_bayes: return "nb";
    case ModelKind::naive_bayes_relevance: return "nbw";
    case ModelKind::kde: return "kde";
    case ModelKind::manifold_global: return "mdist-global";
    case ModelKind::manifold_local: return "mdist-local";
    case ModelKind::manifold_density: return "mdensity";
    case ModelKind::ocsvm: return "ocsvm";
  }
  return "unknown";
}

std::string_view model_kind_title(ModelKind kind) {
  switch (kind) {
    case ModelKind::baseline: return "Baseline";
    case ModelKind::naive_bayes: return "Naive Bayes";
    case ModelKind::naive_bayes_relevance: return "Naive Bayes with Attribute relevance";
    case ModelKind::kde: return "Nonparametric Model";
    case ModelKind::manifold_global: return "Global Manifold Distance";
    case ModelKind::manifold_local: return "Local Manifold Distance";
    case ModelKind::manifold_density: return "Manifold-based Density Model";
    case ModelKind::ocsvm: return "One class SVM";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view token) {
  for (ModelKind k : kAllModelKinds)
    if (model_kind_token(k) == token) return k;
  return std::nullopt;
}

std::size_t CategoryDistribution::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

void check_dimension(std::size_t expected, std::size_t actual) {
  if (expected != actual) throw DimensionError(expected, actual);
}

}  // namespace typicality
