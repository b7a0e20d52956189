#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "typicality/dataset.hpp"

namespace typicality {

struct RelevanceOptions {
  int bins = 16;
  double entropy_floor = 1e-3;  ///< bits
};

/// Inverse conditional entropy of each attribute over a category's typical samples.
/// High weight means a peaky distribution: an attribute that is consistently
/// present or consistently absent, whatever its value.
struct RelevanceWeights {
  static constexpr const char* kModelKind = "relevance_weights";

  std::vector<std::string> categories;
  Eigen::MatrixXd weights;  ///< K x M, 1 / max(H, entropy_floor)
  Eigen::MatrixXd entropy;  ///< K x M, bits
  Eigen::MatrixXd range_lo;  ///< K x M histogram ranges, kept for consistent binning
  Eigen::MatrixXd range_hi;
  int bins = 16;
  double entropy_floor = 1e-3;

  std::vector<double> row(std::size_t category) const;
};

/// Shannon entropy (bits) of an equal-width histogram spanning [min, max].
/// The maximum lands in the last bin; constant samples occupy a single bin.
double estimate_entropy(std::span<const double> samples, int bins);

RelevanceWeights compute_relevance(const Dataset& train, const RelevanceOptions& options = {});

void to_json(nlohmann::json& j, const RelevanceWeights& w);
void from_json(const nlohmann::json& j, RelevanceWeights& w);

}  // namespace typicality
