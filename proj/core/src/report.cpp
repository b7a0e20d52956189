#include "typicality/report.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "typicality/error.hpp"

namespace typicality {

std::vector<std::size_t> AbnormalityReport::top_attributes(std::size_t n) const {
  std::vector<std::size_t> order(attribute_evidence.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return attribute_evidence[a] > attribute_evidence[b]; });
  order.resize(std::min(n, order.size()));
  return order;
}

std::vector<double> attribute_information_content(const ManifoldModel& manifold, const RelevanceWeights& weights,
                                                  std::span<const double> x, const CategoryLabel& c_star) {
  if (manifold.category.name != c_star.name)
    throw ValidationError("manifold model belongs to '" + manifold.category.name + "', not '" + c_star.name + "'");
  if (c_star.index >= weights.categories.size() || weights.categories[c_star.index] != c_star.name)
    throw ValidationError("relevance weights have no row for category '" + c_star.name + "'");
  const auto m = static_cast<std::size_t>(manifold.points.cols());
  check_dimension(m, x.size());
  check_dimension(m, static_cast<std::size_t>(weights.weights.cols()));

  const ManifoldPatch& patch = manifold.patches[nearest_point(manifold, x)];
  std::vector<double> ic(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    const double diff = x[i] - patch.mean(e);
    // log2(p(mean) / p(x)) for a Gaussian.
    const double bits = diff * diff / (2.0 * patch.variance(e) * std::numbers::ln2);
    ic[i] = weights.weights(static_cast<Eigen::Index>(c_star.index), e) * bits;
  }
  return ic;
}

AbnormalityReport group_report(std::span<const double> evidence, const AttributeGrouping& grouping,
                               CategoryLabel category) {
  const std::size_t g = grouping.num_groups();
  if (g == 0) throw ValidationError("attribute grouping has no groups");
  check_dimension(grouping.group_of.size(), evidence.size());
  AbnormalityReport report;
  report.category = std::move(category);
  report.attribute_evidence.assign(evidence.begin(), evidence.end());
  report.group_distribution.assign(g, 0.0);
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    if (!std::isfinite(evidence[i]) || evidence[i] < 0.0)
      throw ValidationError("attribute evidence must be finite and nonnegative");
    report.group_distribution[grouping.group_of[i]] += evidence[i];
  }
  const double total = std::accumulate(report.group_distribution.begin(), report.group_distribution.end(), 0.0);
  if (total > 0.0) {
    for (double& v : report.group_distribution) v /= total;
  } else {
    std::fill(report.group_distribution.begin(), report.group_distribution.end(), 1.0 / static_cast<double>(g));
  }
  return report;
}

AbnormalityReport information_content_report(const ManifoldModel& manifold, const RelevanceWeights& weights,
                                             std::span<const double> x, const CategoryLabel& c_star,
                                             const AttributeGrouping& grouping) {
  const auto ic = attribute_information_content(manifold, weights, x, c_star);
  return group_report(ic, grouping, c_star);
}

AbnormalityReport baseline_report(const GaussianNB& nb, std::span<const double> x, double m_sigma,
                                  const AttributeGrouping& grouping) {
  const auto m = static_cast<std::size_t>(nb.mean.size());
  check_dimension(m, x.size());
  check_dimension(m, grouping.group_of.size());
  if (!(m_sigma > 0.0)) throw ValidationError("interval width must be positive");
  std::vector<double> deviation(m);
  std::vector<double> flags(m);
  std::vector<bool> flagged(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    deviation[i] = std::abs(x[i] - nb.mean(e)) / std::sqrt(nb.variance(e));
    flagged[i] = deviation[i] > m_sigma;
    flags[i] = flagged[i] ? 1.0 : 0.0;
  }
  AbnormalityReport report = group_report(flags, grouping, nb.category);
  report.attribute_evidence = std::move(deviation);
  report.flagged = std::move(flagged);
  return report;
}

}  // namespace typicality
