#include "typicality/classify.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "typicality/error.hpp"
#include "typicality/model_io.hpp"
#include "typicality/stats.hpp"

namespace typicality {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-20;

void require_two_per_class(const Dataset& train) {
  if (train.num_categories() < 2) throw TrainingError("stage-1 training needs at least two categories");
  for (std::size_t c = 0; c < train.num_categories(); ++c)
    if (train.count_typical(c) < 2)
      throw TrainingError("category '" + train.category_names()[c] + "' has " +
                          std::to_string(train.count_typical(c)) + " typical samples; need at least 2");
}

}  // namespace

MulticlassObjective::MulticlassObjective(Eigen::MatrixXd features, std::vector<std::size_t> labels,
                                         std::size_t num_classes, double l2)
    : features_(std::move(features)), labels_(std::move(labels)), num_classes_(num_classes), l2_(l2) {
  if (static_cast<std::size_t>(features_.rows()) != labels_.size())
    throw TrainingError("feature rows and labels differ in length");
  if (features_.rows() == 0) throw TrainingError("no training samples");
  if (l2_ < 0.0) throw TrainingError("l2 penalty must be nonnegative");
  for (std::size_t y : labels_)
    if (y >= num_classes_) throw TrainingError("label out of range");
}

MulticlassObjective MulticlassObjective::from_dataset(const Dataset& train, double l2) {
  std::vector<std::size_t> labels;
  std::vector<const Sample*> rows;
  for (const auto& s : train.samples())
    if (s.flag == TypicalityFlag::typical) {
      rows.push_back(&s);
      labels.push_back(s.label);
    }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(train.num_attributes()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    x.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(rows[i]->values.data(), x.cols());
  return MulticlassObjective(std::move(x), std::move(labels), train.num_categories(), l2);
}

Eigen::MatrixXd MulticlassObjective::logits(const Eigen::MatrixXd& weights) const {
  const Eigen::Index m = features_.cols();
  Eigen::MatrixXd z = features_ * weights.leftCols(m).transpose();
  z.rowwise() += weights.col(m).transpose();
  return z;  // N x K
}

double MulticlassObjective::value(const Eigen::MatrixXd& weights) const {
  const Eigen::MatrixXd z = logits(weights);
  double nll = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double top = z.row(i).maxCoeff();
    const double lse = top + std::log((z.row(i).array() - top).exp().sum());
    nll += lse - z(i, static_cast<Eigen::Index>(labels_[static_cast<std::size_t>(i)]));
  }
  const Eigen::Index m = features_.cols();
  return nll / static_cast<double>(z.rows()) + 0.5 * l2_ * weights.leftCols(m).squaredNorm();
}

double MulticlassObjective::value_and_gradient(const Eigen::MatrixXd& weights, Eigen::MatrixXd& gradient) const {
  const Eigen::MatrixXd z = logits(weights);
  const Eigen::Index n = z.rows();
  const Eigen::Index m = features_.cols();
  Eigen::MatrixXd residual(n, z.cols());
  double nll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = z.row(i).maxCoeff();
    Eigen::RowVectorXd p = (z.row(i).array() - top).exp();
    const double total = p.sum();
    const auto y = static_cast<Eigen::Index>(labels_[static_cast<std::size_t>(i)]);
    nll += top + std::log(total) - z(i, y);
    p /= total;
    p(y) -= 1.0;
    residual.row(i) = p;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  gradient.resize(weights.rows(), weights.cols());
  gradient.leftCols(m) = inv_n * residual.transpose() * features_ + l2_ * weights.leftCols(m);
  gradient.col(m) = inv_n * residual.colwise().sum().transpose();
  return nll * inv_n + 0.5 * l2_ * weights.leftCols(m).squaredNorm();
}

MulticlassModel train_multiclass(const Dataset& train, const MulticlassOptions& options, TrainingTrace* trace) {
  require_two_per_class(train);
  if (options.max_iter < 0) throw TrainingError("max_iter must be nonnegative");
  const auto objective = MulticlassObjective::from_dataset(train, options.l2);

  const auto k = static_cast<Eigen::Index>(train.num_categories());
  const auto m = static_cast<Eigen::Index>(train.num_attributes());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k, m + 1);
  Eigen::MatrixXd grad;
  double loss = objective.value_and_gradient(w, grad);
  double grad_norm = grad.norm();
  TrainingTrace local;
  local.loss.push_back(loss);

  double step = 1.0;
  int iter = 0;
  while (iter < options.max_iter && grad_norm > options.tol) {
    const double g2 = grad_norm * grad_norm;
    Eigen::MatrixXd candidate;
    double cand_loss = 0.0;
    bool accepted = false;
    while (step >= kMinStep) {
      candidate = w - step * grad;
      cand_loss = objective.value(candidate);
      if (cand_loss <= loss - kArmijo * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent left at machine precision
    ++iter;
    w = std::move(candidate);
    loss = objective.value_and_gradient(w, grad);
    grad_norm = grad.norm();
    local.loss.push_back(loss);
    step *= 2.0;
  }

  local.gradient_norm = grad_norm;
  local.iterations = iter;
  local.converged = grad_norm <= options.tol;
  if (trace) *trace = std::move(local);
  return MulticlassModel{train.category_names(), std::move(w), options.l2};
}

Eigen::VectorXd class_scores(const MulticlassModel& model, std::span<const double> x) {
  check_dimension(model.num_attributes(), x.size());
  const auto m = static_cast<Eigen::Index>(x.size());
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), m);
  return model.weights.leftCols(m) * v + model.weights.col(m);
}

CategoryDistribution predict_category_distribution(const MulticlassModel& model, std::span<const double> x) {
  const Eigen::VectorXd z = class_scores(model, x);
  const double top = z.maxCoeff();
  Eigen::VectorXd p = (z.array() - top).exp();
  p /= p.sum();
  return CategoryDistribution{std::vector<double>(p.data(), p.data() + p.size())};
}

BaselineTypicalityModel train_confidence_baseline(const MulticlassModel& model, const Dataset& train) {
  if (train.category_names() != model.categories)
    throw TrainingError("baseline training data and stage-1 model disagree on categories");
  BaselineTypicalityModel out;
  out.categories = model.categories;
  for (std::size_t c = 0; c < train.num_categories(); ++c) {
    const auto rows = train.typical_rows(c);
    if (rows.size() < 2)
      throw TrainingError("category '" + train.category_names()[c] + "' has " + std::to_string(rows.size()) +
                          " typical samples; need at least 2");
    std::vector<double> scores;
    scores.reserve(rows.size());
    for (auto row : rows) scores.push_back(class_scores(model, row)(static_cast<Eigen::Index>(c)));
    out.mean.push_back(stats::mean(scores));
    out.variance.push_back(stats::floored_variance(scores));
  }
  return out;
}

TypicalityScore baseline_typicality_score(const BaselineTypicalityModel& baseline, const MulticlassModel& model,
                                          std::span<const double> x, std::size_t category) {
  if (category >= baseline.mean.size() || category >= model.num_categories())
    throw ValidationError("unknown category index " + std::to_string(category));
  const double s = class_scores(model, x)(static_cast<Eigen::Index>(category));
  return {stats::gaussian_log_density(s, baseline.mean[category], baseline.variance[category]),
          ModelKind::baseline};
}

void to_json(nlohmann::json& j, const MulticlassModel& m) {
  j = {{"categories", m.categories}, {"weights", json_io::from_matrix(m.weights)}, {"l2_lambda", m.l2_lambda}};
}

void from_json(const nlohmann::json& j, MulticlassModel& m) {
  m.categories = j.at("categories").get<std::vector<std::string>>();
  m.weights = json_io::to_matrix(j.at("weights"));
  m.l2_lambda = j.at("l2_lambda").get<double>();
  if (static_cast<std::size_t>(m.weights.rows()) != m.categories.size() || m.weights.cols() < 2)
    throw ModelFormatError("multiclass weights do not match the category list");
}

void to_json(nlohmann::json& j, const BaselineTypicalityModel& m) {
  j = {{"categories", m.categories}, {"mean", m.mean}, {"variance", m.variance}};
}

void from_json(const nlohmann::json& j, BaselineTypicalityModel& m) {
  m.categories = j.at("categories").get<std::vector<std::string>>();
  m.mean = j.at("mean").get<std::vector<double>>();
  m.variance = j.at("variance").get<std::vector<double>>();
  if (m.mean.size() != m.categories.size() || m.variance.size() != m.categories.size())
    throw ModelFormatError("baseline statistics do not match the category list");
}

}  // namespace typicality
