#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "typicality/dataset.hpp"
#include "typicality/types.hpp"

namespace typicality {

/// Independent per-attribute Gaussians for one category.
struct GaussianNB {
  static constexpr const char* kModelKind = "gaussian_nb";

  CategoryLabel category;
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  ///< floored at kVarianceFloor
};

/// Sample mean and unbiased variance of the category's typical samples (at least two).
GaussianNB fit_naive_bayes(const Dataset& train, std::size_t category);
GaussianNB fit_naive_bayes(std::span<const std::span<const double>> rows, CategoryLabel category);

/// Rescales relevance weights to average one: M * w_i / sum(w). Uniform weights map to exactly one.
std::vector<double> normalized_relevance(std::span<const double> weights);

/// Per-attribute log N(x_i; mean_i, variance_i), optionally scaled by normalized relevance.
Eigen::VectorXd weighted_log_densities(const Eigen::VectorXd& mean, const Eigen::VectorXd& variance,
                                       std::span<const double> x, std::span<const double> relevance);

/// Sum of per-attribute Gaussian log-densities. A non-empty `relevance` row
/// weights each term by the normalized relevance of that attribute.
TypicalityScore nb_log_likelihood(const GaussianNB& model, std::span<const double> x,
                                  std::span<const double> relevance = {});

enum class BandwidthRule { silverman, fixed };

struct KdeOptions {
  BandwidthRule rule = BandwidthRule::silverman;
  double fixed_bandwidth = 0.5;
  /// One bandwidth shared by every attribute (Silverman on the mean variance).
  bool scalar = false;
};

inline constexpr double kBandwidthFloor = 1e-3;

/// Product Gaussian kernel density over a category's typical samples.
struct KDEModel {
  static constexpr const char* kModelKind = "kde";

  CategoryLabel category;
  Eigen::MatrixXd points;     ///< N x M
  Eigen::VectorXd bandwidth;  ///< per attribute
};

/// 1.06 * sd * n^(-1/5), floored at kBandwidthFloor; fewer than two values give the floor.
double silverman_bandwidth(std::span<const double> values);

KDEModel fit_kde(const Dataset& train, std::size_t category, const KdeOptions& options = {});
KDEModel fit_kde(std::span<const std::span<const double>> rows, CategoryLabel category,
                 const KdeOptions& options = {});

/// log((1/N) sum_j prod_i N(x_i - p_ji; 0, h_i^2)), accumulated with log-sum-exp.
TypicalityScore kde_log_likelihood(const KDEModel& model, std::span<const double> x);

void to_json(nlohmann::json& j, const GaussianNB& m);
void from_json(const nlohmann::json& j, GaussianNB& m);
void to_json(nlohmann::json& j, const KDEModel& m);
void from_json(const nlohmann::json& j, KDEModel& m);

// Shared by every model that stores its category.
void to_json(nlohmann::json& j, const CategoryLabel& c);
void from_json(const nlohmann::json& j, CategoryLabel& c);

}  // namespace typicality
