#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "typicality/classify.hpp"
#include "typicality/dataset.hpp"
#include "typicality/density.hpp"
#include "typicality/manifold.hpp"
#include "typicality/ocsvm.hpp"
#include "typicality/relevance.hpp"
#include "typicality/types.hpp"

namespace typicality {

struct NaiveBayesSet {
  std::vector<GaussianNB> models;
  std::optional<RelevanceWeights> relevance;  ///< set for the relevance-weighted variant
};

struct KdeSet {
  std::vector<KDEModel> models;
};

struct ManifoldSet {
  std::vector<ManifoldModel> models;
  RelevanceWeights relevance;     ///< used by attribute reporting, and by the density when weighted
  bool weighted_density = false;
};

struct OcsvmSet {
  std::vector<OcsvmModel> models;
};

struct BaselineSet {
  MulticlassModel stage1;
  BaselineTypicalityModel baseline;
};

/// Per-category typicality models of one kind, trained on typical samples only.
class TypicalityModel {
 public:
  static constexpr const char* kModelKind = "typicality_model";

  using Payload = std::variant<NaiveBayesSet, KdeSet, ManifoldSet, OcsvmSet, BaselineSet>;

  TypicalityModel() = default;
  /// Throws ValidationError when the payload does not fit `kind` or the category list.
  TypicalityModel(ModelKind kind, std::vector<std::string> categories, Payload payload);

  ModelKind kind() const { return kind_; }
  const std::vector<std::string>& categories() const { return categories_; }
  const Payload& payload() const { return payload_; }
  std::optional<std::size_t> category_index(std::string_view name) const;

  /// Typicality of x given the category at `category` in this model's list.
  TypicalityScore score(std::size_t category, std::span<const double> x) const;

 private:
  ModelKind kind_ = ModelKind::naive_bayes;
  std::vector<std::string> categories_;
  Payload payload_;
};

struct TrainConfig {
  MulticlassOptions stage1;
  RelevanceOptions relevance;
  KdeOptions kde;
  ManifoldOptions manifold;
  OcsvmOptions ocsvm;
  bool weighted_manifold_density = false;
};

/// `stage1` is required for ModelKind::baseline and ignored otherwise.
TypicalityModel train_typicality_model(ModelKind kind, const Dataset& train, const TrainConfig& config,
                                       const MulticlassModel* stage1 = nullptr);

/// One model per kind, in order, sharing the fits common to several kinds
/// (naive Bayes, relevance, manifolds). `stage1` is needed only for the baseline.
std::vector<TypicalityModel> train_models(const Dataset& train, std::span<const ModelKind> kinds,
                                          const TrainConfig& config, const MulticlassModel* stage1 = nullptr);

/// Stage-1 classifier plus one typicality model per requested kind.
struct TrainedSuite {
  MulticlassModel stage1;
  std::vector<TypicalityModel> models;
};

TrainedSuite train_suite(const Dataset& train, std::span<const ModelKind> kinds, const TrainConfig& config);

void to_json(nlohmann::json& j, const TypicalityModel& m);
void from_json(const nlohmann::json& j, TypicalityModel& m);

}  // namespace typicality
