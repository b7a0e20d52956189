#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace typicality {

/// Mann-Whitney AUC: probability that a random positive (typical) sample
/// outscores a random negative (abnormal) one, ties counted one half.
/// Throws unless both classes are present.
double roc_auc(std::span<const double> scores, const std::vector<bool>& positive);

/// KL(p || q) in bits after adding `epsilon` to every entry and renormalizing.
/// Throws if either input is all zero or has a negative entry.
double kl_divergence(std::span<const double> p, std::span<const double> q, double epsilon = 1e-4);

/// Row-normalized K x K rates, row = true label, column = prediction.
/// Rows of labels that never occur stay zero.
Eigen::MatrixXd confusion_matrix(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                                 std::size_t num_categories);

}  // namespace typicality
