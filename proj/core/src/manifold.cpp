#include "typicality/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "typicality/density.hpp"
#include "typicality/error.hpp"
#include "typicality/log.hpp"
#include "typicality/model_io.hpp"
#include "typicality/stats.hpp"

namespace typicality {
namespace {

constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);

/// k nearest points to `anchor`, excluding the anchor and `skip`. Ties by lower index.
std::vector<std::size_t> nearest_neighbors(const Eigen::MatrixXd& points, std::size_t anchor, std::size_t k,
                                           std::size_t skip) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<std::pair<double, std::size_t>> cand;
  cand.reserve(n);
  const auto a = points.row(static_cast<Eigen::Index>(anchor));
  for (std::size_t j = 0; j < n; ++j) {
    if (j == anchor || j == skip) continue;
    cand.emplace_back((points.row(static_cast<Eigen::Index>(j)) - a).squaredNorm(), j);
  }
  k = std::min(k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = cand[i].second;
  return out;
}

std::size_t nearest_index(const Eigen::MatrixXd& points, const Eigen::Ref<const Eigen::RowVectorXd>& q,
                          std::size_t skip) {
  std::size_t best = kNoSkip;
  double best_d = 0.0;
  for (Eigen::Index j = 0; j < points.rows(); ++j) {
    if (static_cast<std::size_t>(j) == skip) continue;
    const double dist = (points.row(j) - q).squaredNorm();
    if (best == kNoSkip || dist < best_d) {
      best = static_cast<std::size_t>(j);
      best_d = dist;
    }
  }
  return best;
}

ManifoldPatch fit_patch(const Eigen::MatrixXd& points, std::size_t anchor, std::vector<std::size_t> neighbors, int d) {
  ManifoldPatch patch;
  patch.members.reserve(neighbors.size() + 1);
  patch.members.push_back(anchor);
  patch.members.insert(patch.members.end(), neighbors.begin(), neighbors.end());

  Eigen::MatrixXd rows(static_cast<Eigen::Index>(patch.members.size()), points.cols());
  for (std::size_t i = 0; i < patch.members.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = points.row(static_cast<Eigen::Index>(patch.members[i]));

  patch.mean = rows.colwise().mean().transpose();
  patch.variance.resize(points.cols());
  std::vector<double> col(patch.members.size());
  for (Eigen::Index a = 0; a < points.cols(); ++a) {
    for (Eigen::Index i = 0; i < rows.rows(); ++i) col[static_cast<std::size_t>(i)] = rows(i, a);
    patch.variance(a) = stats::floored_variance(col);
  }
  patch.basis = tangent_basis(rows, d);
  return patch;
}

GaussianStats fit_stats(std::span<const double> values) {
  return GaussianStats{stats::mean(values), stats::floored_variance(values)};
}

}  // namespace

Eigen::MatrixXd tangent_basis(const Eigen::MatrixXd& rows, int d) {
  if (d < 0) throw Error("subspace dimension must be nonnegative");
  const Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::Index rank = 0;
  const Eigen::Index limit = std::min<Eigen::Index>(d, sv.size());
  if (sv.size() > 0 && sv(0) > 0.0)
    while (rank < limit && sv(rank) > kRankTolerance * sv(0)) ++rank;
  return svd.matrixV().leftCols(rank);
}

ManifoldModel build_manifold(const Dataset& train, std::size_t category, const ManifoldOptions& options) {
  const auto rows = train.typical_rows(category);
  const auto n = static_cast<int>(rows.size());
  const int k = options.k.value_or(std::min(10, n - 1));
  const int d = options.d.value_or(std::min(3, k - 1));
  Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(train.num_attributes()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    points.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(rows[i].data(), points.cols());
  return build_manifold(std::move(points), train.category(category), k, d);
}

ManifoldModel build_manifold(Eigen::MatrixXd points, CategoryLabel category, int k, int d) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k < 1 || static_cast<std::size_t>(k) >= n)
    throw TrainingError("category '" + category.name + "' has " + std::to_string(n) +
                        " typical samples; a manifold with patch size " + std::to_string(k) + " needs at least " +
                        std::to_string(k + 1));
  if (d < 0 || d >= k) throw TrainingError("manifold dimension d must satisfy 0 <= d < k");

  ManifoldModel model;
  model.category = std::move(category);
  model.k = k;
  model.d = d;
  model.points = std::move(points);
  const auto& pts = model.points;

  std::size_t deficient = 0;
  model.patches.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    model.patches.push_back(fit_patch(pts, p, nearest_neighbors(pts, p, static_cast<std::size_t>(k), kNoSkip), d));
    if (model.patches.back().basis.cols() < d) ++deficient;
  }
  if (deficient > 0)
    warn("manifold '" + model.category.name + "': " + std::to_string(deficient) + " of " + std::to_string(n) +
         " patches have rank below d=" + std::to_string(d) + "; extra directions dropped");

  model.loo_distances.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    const auto row = pts.row(static_cast<Eigen::Index>(q));
    const std::size_t anchor = nearest_index(pts, row, q);
    const ManifoldPatch& cached = model.patches[anchor];
    // Rows of a column-major matrix are strided; copy before viewing as a span.
    const Eigen::VectorXd xq = row.transpose();
    const std::span<const double> xs(xq.data(), static_cast<std::size_t>(xq.size()));
    if (std::find(cached.members.begin(), cached.members.end(), q) == cached.members.end()) {
      model.loo_distances[q] = projection_residual(cached, xs);
    } else {
      const ManifoldPatch held_out =
          fit_patch(pts, anchor, nearest_neighbors(pts, anchor, static_cast<std::size_t>(k), q), d);
      model.loo_distances[q] = projection_residual(held_out, xs);
    }
  }

  model.global_distance = fit_stats(model.loo_distances);
  std::vector<double> local;
  for (auto& patch : model.patches) {
    local.clear();
    for (std::size_t member : patch.members) local.push_back(model.loo_distances[member]);
    patch.distance = fit_stats(local);
  }
  return model;
}

std::size_t nearest_point(const ManifoldModel& model, std::span<const double> x) {
  check_dimension(static_cast<std::size_t>(model.points.cols()), x.size());
  const Eigen::Map<const Eigen::RowVectorXd> q(x.data(), model.points.cols());
  return nearest_index(model.points, q, kNoSkip);
}

double projection_residual(const ManifoldPatch& patch, std::span<const double> x) {
  check_dimension(static_cast<std::size_t>(patch.mean.size()), x.size());
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), patch.mean.size());
  const Eigen::VectorXd centered = v - patch.mean;
  const Eigen::VectorXd residual = centered - patch.basis * (patch.basis.transpose() * centered);
  return residual.norm();
}

double manifold_distance(const ManifoldModel& model, std::span<const double> x) {
  return projection_residual(model.patches[nearest_point(model, x)], x);
}

TypicalityScore manifold_distance_score(const ManifoldModel& model, std::span<const double> x, DistanceMode mode) {
  const std::size_t anchor = nearest_point(model, x);
  const ManifoldPatch& patch = model.patches[anchor];
  const std::optional<GaussianStats>& s = mode == DistanceMode::global ? model.global_distance : patch.distance;
  if (!s) throw Error("manifold '" + model.category.name + "' has no fitted distance statistics");
  const double dist = projection_residual(patch, x);
  return {stats::gaussian_log_density(dist, s->mean, s->variance),
          mode == DistanceMode::global ? ModelKind::manifold_global : ModelKind::manifold_local};
}

ManifoldDensity manifold_density(const ManifoldModel& model, std::span<const double> x,
                                 std::span<const double> relevance) {
  ManifoldDensity out;
  out.anchor = nearest_point(model, x);
  const ManifoldPatch& patch = model.patches[out.anchor];
  out.attribute_terms = weighted_log_densities(patch.mean, patch.variance, x, relevance);
  out.total = out.attribute_terms.sum();
  return out;
}

TypicalityScore manifold_density_log_likelihood(const ManifoldModel& model, std::span<const double> x,
                                                std::span<const double> relevance) {
  return {manifold_density(model, x, relevance).total, ModelKind::manifold_density};
}

namespace {

nlohmann::json stats_json(const std::optional<GaussianStats>& s) {
  if (!s) return nullptr;
  return {{"mean", s->mean}, {"variance", s->variance}};
}

std::optional<GaussianStats> stats_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return GaussianStats{j.at("mean").get<double>(), j.at("variance").get<double>()};
}

}  // namespace

void to_json(nlohmann::json& j, const ManifoldModel& m) {
  nlohmann::json patches = nlohmann::json::array();
  for (const auto& p : m.patches)
    patches.push_back({{"members", p.members},
                       {"mean", json_io::from_vector(p.mean)},
                       {"variance", json_io::from_vector(p.variance)},
                       {"basis", json_io::from_matrix(p.basis)},
                       {"distance", stats_json(p.distance)}});
  j = {{"category", m.category},
       {"points", json_io::from_matrix(m.points)},
       {"k", m.k},
       {"d", m.d},
       {"patches", std::move(patches)},
       {"loo_distances", m.loo_distances},
       {"global_distance", stats_json(m.global_distance)}};
}

void from_json(const nlohmann::json& j, ManifoldModel& m) {
  m.category = j.at("category").get<CategoryLabel>();
  m.points = json_io::to_matrix(j.at("points"));
  m.k = j.at("k").get<int>();
  m.d = j.at("d").get<int>();
  m.patches.clear();
  for (const auto& p : j.at("patches")) {
    ManifoldPatch patch;
    patch.members = p.at("members").get<std::vector<std::size_t>>();
    patch.mean = json_io::to_vector(p.at("mean"));
    patch.variance = json_io::to_vector(p.at("variance"));
    patch.basis = json_io::to_matrix(p.at("basis"));
    patch.distance = stats_from(p.at("distance"));
    if (patch.mean.size() != m.points.cols() || patch.variance.size() != m.points.cols() ||
        (patch.basis.cols() > 0 && patch.basis.rows() != m.points.cols()))
      throw ModelFormatError("manifold patch shape mismatch");
    m.patches.push_back(std::move(patch));
  }
  if (static_cast<Eigen::Index>(m.patches.size()) != m.points.rows())
    throw ModelFormatError("manifold needs one patch per training point");
  m.loo_distances = j.at("loo_distances").get<std::vector<double>>();
  m.global_distance = stats_from(j.at("global_distance"));
}

}  // namespace typicality
