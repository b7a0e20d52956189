#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "typicality/dataset.hpp"
#include "typicality/types.hpp"

namespace typicality {

struct ManifoldOptions {
  std::optional<int> k;  ///< patch size; default min(10, N - 1)
  std::optional<int> d;  ///< local subspace dimension; default min(3, k - 1)
};

struct GaussianStats {
  double mean = 0.0;
  double variance = kVarianceFloor;
};

/// Neighborhood of one training point: the anchor plus its k nearest neighbors.
struct ManifoldPatch {
  std::vector<std::size_t> members;  ///< anchor first, then neighbors by increasing distance
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  ///< per attribute over the members, floored
  Eigen::MatrixXd basis;     ///< M x r orthonormal columns, r <= d
  std::optional<GaussianStats> distance;
};

/// Typical samples of one category viewed as a sampled low-dimensional manifold.
struct ManifoldModel {
  static constexpr const char* kModelKind = "manifold";

  CategoryLabel category;
  Eigen::MatrixXd points;  ///< N x M
  int k = 0;
  int d = 0;
  std::vector<ManifoldPatch> patches;  ///< one per training point
  std::vector<double> loo_distances;
  std::optional<GaussianStats> global_distance;
};

/// Singular values at or below this fraction of the largest are treated as zero.
inline constexpr double kRankTolerance = 1e-10;

/// Top-d right singular vectors of the mean-centered rows (M x r, r <= d after
/// dropping numerically zero directions).
Eigen::MatrixXd tangent_basis(const Eigen::MatrixXd& rows, int d);

/// Builds every patch and fits the distance Gaussians on leave-one-out distances:
/// each training point is measured against the patch of its nearest other point,
/// rebuilt without it when it was one of that patch's members.
ManifoldModel build_manifold(const Dataset& train, std::size_t category, const ManifoldOptions& options = {});
ManifoldModel build_manifold(Eigen::MatrixXd points, CategoryLabel category, int k, int d);

/// Index of the nearest training point (Euclidean; ties go to the lower index).
std::size_t nearest_point(const ManifoldModel& model, std::span<const double> x);

/// Norm of the component of (x - patch mean) orthogonal to the patch basis.
double projection_residual(const ManifoldPatch& patch, std::span<const double> x);

/// Residual against the patch anchored at x's nearest training point.
double manifold_distance(const ManifoldModel& model, std::span<const double> x);

enum class DistanceMode { global, local };

/// Gaussian log-density of manifold_distance under the global or the nearest patch's statistics.
TypicalityScore manifold_distance_score(const ManifoldModel& model, std::span<const double> x, DistanceMode mode);

struct ManifoldDensity {
  double total = 0.0;
  Eigen::VectorXd attribute_terms;  ///< sums to total
  std::size_t anchor = 0;
};

/// Naive Bayes under the per-attribute Gaussians of the nearest patch,
/// optionally relevance-weighted as in nb_log_likelihood.
ManifoldDensity manifold_density(const ManifoldModel& model, std::span<const double> x,
                                 std::span<const double> relevance = {});
TypicalityScore manifold_density_log_likelihood(const ManifoldModel& model, std::span<const double> x,
                                                std::span<const double> relevance = {});

void to_json(nlohmann::json& j, const ManifoldModel& m);
void from_json(const nlohmann::json& j, ManifoldModel& m);

}  // namespace typicality
