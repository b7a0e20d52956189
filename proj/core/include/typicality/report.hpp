#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "typicality/dataset.hpp"
#include "typicality/density.hpp"
#include "typicality/manifold.hpp"
#include "typicality/relevance.hpp"
#include "typicality/types.hpp"

namespace typicality {

/// Why an instance looks abnormal, spread over attribute groups.
struct AbnormalityReport {
  CategoryLabel category;                  ///< the stage-1 decision
  std::vector<double> attribute_evidence;  ///< IC in bits, or standardized deviation for the baselines
  std::vector<bool> flagged;               ///< interval baselines only
  std::vector<double> group_distribution;  ///< sums to one

  /// Attribute indices by decreasing evidence (ties by index), at most `n`.
  std::vector<std::size_t> top_attributes(std::size_t n) const;
};

/// IC_i = w[c*][i] * log2(1 / P_i), where P_i is the local Gaussian density of
/// attribute i on the patch nearest x, divided by its value at the patch mean.
/// The manifold model must belong to `c_star`.
std::vector<double> attribute_information_content(const ManifoldModel& manifold, const RelevanceWeights& weights,
                                                  std::span<const double> x, const CategoryLabel& c_star);

/// Sums per-attribute evidence within each group and normalizes. A zero total
/// gives the uniform distribution.
AbnormalityReport group_report(std::span<const double> evidence, const AttributeGrouping& grouping,
                               CategoryLabel category = {});

/// Full IC report for x under its decided category.
AbnormalityReport information_content_report(const ManifoldModel& manifold, const RelevanceWeights& weights,
                                             std::span<const double> x, const CategoryLabel& c_star,
                                             const AttributeGrouping& grouping);

/// Flags attribute i when |x_i - mean_i| > m_sigma * sd_i; the group distribution
/// is the normalized flag count per group (uniform when nothing is flagged).
AbnormalityReport baseline_report(const GaussianNB& nb, std::span<const double> x, double m_sigma,
                                  const AttributeGrouping& grouping);

}  // namespace typicality
