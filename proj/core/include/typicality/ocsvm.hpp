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

struct OcsvmOptions {
  double nu = 0.1;
  std::optional<double> gamma;  ///< RBF width; empty selects scale_gamma
  double tol = 1e-4;            ///< maximal KKT violation at exit
  std::optional<long> max_iter;  ///< pair updates; default 10 * N^2
};

/// One-class nu-SVM with RBF kernel, dual scaled so that sum(alpha) = 1 and
/// 0 <= alpha_i <= 1/(nu N).
struct OcsvmModel {
  static constexpr const char* kModelKind = "one_class_svm";

  CategoryLabel category;
  Eigen::MatrixXd support_vectors;  ///< S x M
  Eigen::VectorXd alphas;           ///< S
  double rho = 0.0;
  double nu = 0.1;
  double gamma = 1.0;
  std::size_t training_size = 0;
};

struct OcsvmTrace {
  std::vector<double> objective;  ///< 0.5 a'Ka after each pair update, starting from the initial point
  Eigen::VectorXd alphas;         ///< all N multipliers before pruning
  double kkt_violation = 0.0;
  long iterations = 0;
};

/// Support vectors whose multiplier falls below this are dropped after training.
inline constexpr double kAlphaPruneThreshold = 1e-8;

/// 1 / (M * mean per-attribute variance); 1 when the data has no spread.
double scale_gamma(const Eigen::MatrixXd& points);

/// Pairwise working-set (SMO) solver on the maximal violating pair, lowest
/// index on ties. Throws ConvergenceError carrying the final KKT violation when
/// max_iter updates do not reach tol.
OcsvmModel train_ocsvm(const Dataset& train, std::size_t category, const OcsvmOptions& options = {},
                       OcsvmTrace* trace = nullptr);
OcsvmModel train_ocsvm(const Eigen::MatrixXd& points, CategoryLabel category, const OcsvmOptions& options = {},
                       OcsvmTrace* trace = nullptr);

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

/// sum_i alpha_i exp(-gamma ||x - sv_i||^2) - rho; positive inside the high-density region.
TypicalityScore ocsvm_decision_value(const OcsvmModel& model, std::span<const double> x);

void to_json(nlohmann::json& j, const OcsvmModel& m);
void from_json(const nlohmann::json& j, OcsvmModel& m);

}  // namespace typicality
