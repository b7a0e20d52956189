#include "typicality/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "typicality/error.hpp"

namespace typicality {

double roc_auc(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw ValidationError("scores and labels differ in length");
  const std::size_t n = scores.size();
  const auto n_pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw ValidationError("AUC needs both typical and abnormal samples");
  for (double s : scores)
    if (std::isnan(s)) throw ValidationError("AUC scores contain NaN");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of midranks of the positives.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t)
      if (positive[order[t]]) rank_sum += midrank;
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double kl_divergence(std::span<const double> p, std::span<const double> q, double epsilon) {
  if (p.size() != q.size() || p.empty()) throw ValidationError("KL inputs must be non-empty and equally long");
  if (!(epsilon > 0.0)) throw ValidationError("KL smoothing epsilon must be positive");
  auto smooth = [epsilon](std::span<const double> v) {
    double total = 0.0;
    for (double x : v) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("KL inputs must be finite and nonnegative");
      total += x;
    }
    if (total <= 0.0) throw ValidationError("KL input is all zero");
    std::vector<double> out(v.size());
    const double denom = total + epsilon * static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] + epsilon) / denom;
    return out;
  };
  const auto ps = smooth(p);
  const auto qs = smooth(q);
  double kl = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) kl += ps[i] * std::log2(ps[i] / qs[i]);
  return kl;
}

Eigen::MatrixXd confusion_matrix(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                                 std::size_t num_categories) {
  if (predictions.size() != labels.size()) throw ValidationError("predictions and labels differ in length");
  const auto k = static_cast<Eigen::Index>(num_categories);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_categories || predictions[i] >= num_categories)
      throw ValidationError("category index out of range in confusion matrix");
    counts(static_cast<Eigen::Index>(labels[i]), static_cast<Eigen::Index>(predictions[i])) += 1.0;
  }
  for (Eigen::Index r = 0; r < k; ++r) {
    const double total = counts.row(r).sum();
    if (total > 0.0) counts.row(r) /= total;
  }
  return counts;
}

}  // namespace typicality
