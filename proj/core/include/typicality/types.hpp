#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace typicality {

/// Global variance floor applied by every Gaussian fit.
inline constexpr double kVarianceFloor = 1e-6;

/// A category as seen by a trained model: its index in the training dataset and its name.
struct CategoryLabel {
  std::size_t index = 0;
  std::string name;

  friend bool operator==(const CategoryLabel&, const CategoryLabel&) = default;
};

/// The typicality scorers available to the pipeline.
enum class ModelKind {
  baseline,               ///< Gaussian over the stage-1 class confidence
  naive_bayes,            ///< independent per-attribute Gaussians
  naive_bayes_relevance,  ///< same, log-densities weighted by entropy relevance
  kde,                    ///< product-kernel density estimate
  manifold_global,        ///< tangent-space distance under one Gaussian per category
  manifold_local,         ///< tangent-space distance under one Gaussian per patch
  manifold_density,       ///< naive Bayes fitted on the nearest manifold patch
  ocsvm,                  ///< one-class nu-SVM decision value
};

inline constexpr ModelKind kAllModelKinds[] = {
    ModelKind::baseline,        ModelKind::naive_bayes,     ModelKind::naive_bayes_relevance,
    ModelKind::kde,             ModelKind::manifold_global, ModelKind::manifold_local,
    ModelKind::manifold_density, ModelKind::ocsvm};

/// Short command-line token, e.g. "nbw".
std::string_view model_kind_token(ModelKind kind);
/// Human-readable row title used in result tables.
std::string_view model_kind_title(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view token);

/// Higher is more typical. Only comparable within one kind and one category.
struct TypicalityScore {
  double value = 0.0;
  ModelKind kind = ModelKind::naive_bayes;
};

/// Soft stage-1 output p(C|x).
struct CategoryDistribution {
  std::vector<double> probs;

  std::size_t argmax() const;
};

/// Throws DimensionError unless `actual == expected`.
void check_dimension(std::size_t expected, std::size_t actual);

}  // namespace typicality
