#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "typicality/dataset.hpp"
#include "typicality/types.hpp"

namespace typicality {

struct MulticlassOptions {
  double l2 = 1e-2;
  int max_iter = 500;
  double tol = 1e-6;
};

/// Multinomial logistic regression. Row k of `weights` holds class k's
/// M attribute weights followed by its bias.
struct MulticlassModel {
  static constexpr const char* kModelKind = "multiclass_logistic";

  std::vector<std::string> categories;
  Eigen::MatrixXd weights;
  double l2_lambda = 0.0;

  std::size_t num_categories() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t num_attributes() const { return static_cast<std::size_t>(weights.cols()) - 1; }
};

/// Mean negative log-likelihood plus (l2/2)*||W||^2 over the non-bias weights.
class MulticlassObjective {
 public:
  MulticlassObjective(Eigen::MatrixXd features, std::vector<std::size_t> labels, std::size_t num_classes,
                      double l2);

  /// Typical samples of `train`, in dataset order.
  static MulticlassObjective from_dataset(const Dataset& train, double l2);

  double value(const Eigen::MatrixXd& weights) const;
  double value_and_gradient(const Eigen::MatrixXd& weights, Eigen::MatrixXd& gradient) const;

  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_attributes() const { return static_cast<std::size_t>(features_.cols()); }

 private:
  Eigen::MatrixXd logits(const Eigen::MatrixXd& weights) const;

  Eigen::MatrixXd features_;  // N x M
  std::vector<std::size_t> labels_;
  std::size_t num_classes_;
  double l2_;
};

struct TrainingTrace {
  std::vector<double> loss;  ///< objective after each accepted step, starting with the initial value
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Batch gradient descent with Armijo backtracking from all-zero weights.
/// Trains on the typical samples; every category needs at least two.
MulticlassModel train_multiclass(const Dataset& train, const MulticlassOptions& options = {},
                                 TrainingTrace* trace = nullptr);

/// Pre-softmax class scores w_k . x + b_k.
Eigen::VectorXd class_scores(const MulticlassModel& model, std::span<const double> x);

CategoryDistribution predict_category_distribution(const MulticlassModel& model, std::span<const double> x);

/// Per-category Gaussian over the stage-1 score of that category's typical training images.
struct BaselineTypicalityModel {
  static constexpr const char* kModelKind = "confidence_baseline";

  std::vector<std::string> categories;
  std::vector<double> mean;
  std::vector<double> variance;
};

BaselineTypicalityModel train_confidence_baseline(const MulticlassModel& model, const Dataset& train);

/// log N(score_c(x); mean_c, variance_c).
TypicalityScore baseline_typicality_score(const BaselineTypicalityModel& baseline,
                                          const MulticlassModel& model, std::span<const double> x,
                                          std::size_t category);

void to_json(nlohmann::json& j, const MulticlassModel& m);
void from_json(const nlohmann::json& j, MulticlassModel& m);
void to_json(nlohmann::json& j, const BaselineTypicalityModel& m);
void from_json(const nlohmann::json& j, BaselineTypicalityModel& m);

}  // namespace typicality
