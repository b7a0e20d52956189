#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "typicality/classify.hpp"
#include "typicality/dataset.hpp"
#include "typicality/model_set.hpp"

namespace typicality {

enum class ScoreMode {
  likelihood_given_class,  ///< typicality score alone
  joint,                   ///< score + log p(c*|x)
};

struct EvalConfig {
  ScoreMode mode = ScoreMode::likelihood_given_class;
  double kl_epsilon = 1e-4;
  std::size_t jobs = 1;
  /// Ground truth for attribute reporting. When set, `models` must include a
  /// manifold kind and a naive Bayes kind.
  const RatingTable* ratings = nullptr;
};

/// One table row: a value per category (empty when the cell cannot be
/// computed) and the mean over the present cells.
struct MetricRow {
  std::string name;
  std::vector<std::optional<double>> per_category;
  std::optional<double> average;
};

inline constexpr const char* kInformationContentRow = "Manifold Information Content";
inline constexpr const char* kTwoSigmaRow = "Baseline(1) 2-sigma";
inline constexpr const char* kFourSigmaRow = "Baseline(2) 4-sigma";

struct ResultTable {
  std::vector<std::string> categories;
  std::vector<MetricRow> auc;        ///< one row per typicality model
  std::vector<MetricRow> kl;         ///< reporting methods, mean KL(ground truth || report) in bits
  std::vector<MetricRow> plurality;  ///< reporting methods, share of reports whose top group is the true top group
  Eigen::MatrixXd confusion;         ///< stage-1 rates over every evaluated sample
  std::size_t evaluated = 0;
  std::size_t excluded = 0;  ///< miscategorized by stage 1, left out of AUC and reporting

  const MetricRow* find_auc(std::string_view name) const;
  const MetricRow* find_kl(std::string_view name) const;
};

/// Categorizes every sample with stage 1, keeps the correctly categorized ones,
/// and computes per (model, category) AUC of typical versus abnormal samples.
/// With ratings, also scores the three attribute-reporting methods on the kept
/// abnormal samples that have a rating.
ResultTable run_pipeline(const Dataset& eval_set, const MulticlassModel& stage1,
                         std::span<const TypicalityModel> models, const EvalConfig& config = {});

/// section,row,<categories...>,average
std::string result_table_csv(const ResultTable& table);
/// Aligned plain-text rendering.
std::string result_table_text(const ResultTable& table);

}  // namespace typicality
