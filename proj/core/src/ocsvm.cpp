#include "typicality/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "typicality/density.hpp"
#include "typicality/error.hpp"
#include "typicality/model_io.hpp"

namespace typicality {
namespace {

constexpr double kMinCurvature = 1e-12;

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, double gamma) {
  const Eigen::Index n = x.rows();
  const Eigen::VectorXd sq = x.rowwise().squaredNorm();
  Eigen::MatrixXd k = x * x.transpose();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = std::exp(-gamma * std::max(0.0, sq(i) + sq(j) - 2.0 * k(i, j)));
  return k;
}

struct Violation {
  Eigen::Index up = -1;   // alpha may increase, minimal gradient
  Eigen::Index low = -1;  // alpha may decrease, maximal gradient
  double gap = 0.0;
};

Violation maximal_violating_pair(const Eigen::VectorXd& alpha, const Eigen::VectorXd& grad, double upper) {
  Violation v;
  double g_up = std::numeric_limits<double>::infinity();
  double g_low = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha(i) < upper && grad(i) < g_up) {
      g_up = grad(i);
      v.up = i;
    }
    if (alpha(i) > 0.0 && grad(i) > g_low) {
      g_low = grad(i);
      v.low = i;
    }
  }
  v.gap = (v.up < 0 || v.low < 0) ? 0.0 : g_low - g_up;
  return v;
}

}  // namespace

double scale_gamma(const Eigen::MatrixXd& points) {
  if (points.rows() < 2) return 1.0;
  const Eigen::RowVectorXd mu = points.colwise().mean();
  const double total = (points.rowwise() - mu).squaredNorm() / static_cast<double>(points.rows());
  return total > 0.0 ? 1.0 / total : 1.0;
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  check_dimension(a.size(), b.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-gamma * d2);
}

OcsvmModel train_ocsvm(const Dataset& train, std::size_t category, const OcsvmOptions& options, OcsvmTrace* trace) {
  const auto rows = train.typical_rows(category);
  Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(train.num_attributes()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    points.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(rows[i].data(), points.cols());
  return train_ocsvm(points, train.category(category), options, trace);
}

OcsvmModel train_ocsvm(const Eigen::MatrixXd& points, CategoryLabel category, const OcsvmOptions& options,
                       OcsvmTrace* trace) {
  const Eigen::Index n = points.rows();
  if (n < 2)
    throw TrainingError("category '" + category.name + "' has " + std::to_string(n) +
                        " typical samples; one-class SVM needs at least 2");
  if (!(options.nu > 0.0 && options.nu <= 1.0)) throw TrainingError("nu must lie in (0, 1]");
  if (!(options.tol > 0.0)) throw TrainingError("tolerance must be positive");
  const double gamma = options.gamma.value_or(scale_gamma(points));
  if (!(gamma > 0.0)) throw TrainingError("gamma must be positive");
  const long max_iter = options.max_iter.value_or(10L * static_cast<long>(n) * static_cast<long>(n));

  const Eigen::MatrixXd kernel = kernel_matrix(points, gamma);
  const double upper = 1.0 / (options.nu * static_cast<double>(n));

  // Feasible start: the first floor(nu N) multipliers at the box bound, the remainder on the next one.
  // Counting whole slots avoids leaving a rounding residue when nu N is an integer.
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  const auto full = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(std::floor(options.nu * static_cast<double>(n) + 1e-9)));
  alpha.head(full).setConstant(upper);
  if (full < n) alpha(full) = std::max(0.0, 1.0 - static_cast<double>(full) * upper);
  Eigen::VectorXd grad = kernel * alpha;
  double objective = 0.5 * alpha.dot(grad);

  OcsvmTrace local;
  if (trace) local.objective.push_back(objective);

  long iter = 0;
  Violation v = maximal_violating_pair(alpha, grad, upper);
  while (v.gap > options.tol) {
    if (iter >= max_iter)
      throw ConvergenceError("one-class SVM for '" + category.name + "' did not converge after " +
                                 std::to_string(iter) + " updates (KKT violation " + std::to_string(v.gap) + ")",
                             v.gap);
    const Eigen::Index i = v.up;
    const Eigen::Index j = v.low;
    const double curvature = std::max(kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j), kMinCurvature);
    const double room_i = upper - alpha(i);
    const double room_j = alpha(j);
    const double delta = std::min({(grad(j) - grad(i)) / curvature, room_i, room_j});
    // Clipped steps land exactly on the bound so the active sets stay clean.
    alpha(i) = delta == room_i ? upper : alpha(i) + delta;
    alpha(j) = delta == room_j ? 0.0 : alpha(j) - delta;
    objective += delta * (grad(i) - grad(j)) + 0.5 * delta * delta * (kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j));
    grad += delta * (kernel.col(i) - kernel.col(j));
    ++iter;
    if (trace) local.objective.push_back(objective);
    v = maximal_violating_pair(alpha, grad, upper);
  }

  OcsvmModel model;
  model.category = std::move(category);
  model.nu = options.nu;
  model.gamma = gamma;
  model.training_size = static_cast<std::size_t>(n);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (alpha(i) >= kAlphaPruneThreshold) keep.push_back(i);
  model.support_vectors.resize(static_cast<Eigen::Index>(keep.size()), points.cols());
  model.alphas.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t s = 0; s < keep.size(); ++s) {
    model.support_vectors.row(static_cast<Eigen::Index>(s)) = points.row(keep[s]);
    model.alphas(static_cast<Eigen::Index>(s)) = alpha(keep[s]);
  }

  // Any offset between the bound and the non-bound kernel sums satisfies the
  // converged KKT conditions. Taking the smallest non-bound sum, evaluated
  // exactly as scoring does, leaves every training point below the box bound
  // at f >= 0, so only bound multipliers (at most nu * N of them) fall outside.
  double lowest_free = std::numeric_limits<double>::infinity();
  double highest_bound = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = points.row(i).transpose();
    const double sum = ocsvm_decision_value(model, {xi.data(), static_cast<std::size_t>(xi.size())}).value;
    if (alpha(i) < upper) lowest_free = std::min(lowest_free, sum);
    else highest_bound = std::max(highest_bound, sum);
  }
  model.rho = std::isfinite(lowest_free) ? lowest_free : highest_bound;

  if (trace) {
    local.alphas = alpha;
    local.kkt_violation = v.gap;
    local.iterations = iter;
    *trace = std::move(local);
  }
  return model;
}

TypicalityScore ocsvm_decision_value(const OcsvmModel& model, std::span<const double> x) {
  const auto m = model.support_vectors.cols();
  check_dimension(static_cast<std::size_t>(m), x.size());
  const Eigen::Map<const Eigen::RowVectorXd> q(x.data(), m);
  double f = 0.0;
  for (Eigen::Index s = 0; s < model.support_vectors.rows(); ++s)
    f += model.alphas(s) * std::exp(-model.gamma * (model.support_vectors.row(s) - q).squaredNorm());
  return {f - model.rho, ModelKind::ocsvm};
}

void to_json(nlohmann::json& j, const OcsvmModel& m) {
  j = {{"category", m.category},
       {"support_vectors", json_io::from_matrix(m.support_vectors)},
       {"alphas", json_io::from_vector(m.alphas)},
       {"rho", m.rho},
       {"nu", m.nu},
       {"gamma", m.gamma},
       {"training_size", m.training_size}};
}

void from_json(const nlohmann::json& j, OcsvmModel& m) {
  m.category = j.at("category").get<CategoryLabel>();
  m.support_vectors = json_io::to_matrix(j.at("support_vectors"));
  m.alphas = json_io::to_vector(j.at("alphas"));
  m.rho = j.at("rho").get<double>();
  m.nu = j.at("nu").get<double>();
  m.gamma = j.at("gamma").get<double>();
  m.training_size = j.at("training_size").get<std::size_t>();
  if (m.support_vectors.rows() != m.alphas.size()) throw ModelFormatError("support vector/alpha count mismatch");
}

}  // namespace typicality
