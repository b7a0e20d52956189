#include "typicality/model_set.hpp"

#include <nlohmann/json.hpp>

#include "typicality/error.hpp"
#include "typicality/model_io.hpp"

namespace typicality {
namespace {

template <class Set>
std::size_t set_size(const Set& s) {
  return s.models.size();
}
std::size_t set_size(const BaselineSet& s) { return s.baseline.categories.size(); }

template <class Models>
void check_categories(const Models& models, const std::vector<std::string>& categories) {
  for (std::size_t c = 0; c < models.size(); ++c)
    if (models[c].category.name != categories[c])
      throw ValidationError("model for '" + models[c].category.name + "' stored in slot of '" + categories[c] + "'");
}

bool payload_fits(ModelKind kind, const TypicalityModel::Payload& payload) {
  switch (kind) {
    case ModelKind::baseline: return std::holds_alternative<BaselineSet>(payload);
    case ModelKind::naive_bayes: return std::holds_alternative<NaiveBayesSet>(payload);
    case ModelKind::naive_bayes_relevance:
      return std::holds_alternative<NaiveBayesSet>(payload) && std::get<NaiveBayesSet>(payload).relevance.has_value();
    case ModelKind::kde: return std::holds_alternative<KdeSet>(payload);
    case ModelKind::manifold_global:
    case ModelKind::manifold_local:
    case ModelKind::manifold_density: return std::holds_alternative<ManifoldSet>(payload);
    case ModelKind::ocsvm: return std::holds_alternative<OcsvmSet>(payload);
  }
  return false;
}

std::span<const double> relevance_row(const RelevanceWeights& w, std::size_t c, std::vector<double>& buffer) {
  buffer = w.row(c);
  return buffer;
}

}  // namespace

TypicalityModel::TypicalityModel(ModelKind kind, std::vector<std::string> categories, Payload payload)
    : kind_(kind), categories_(std::move(categories)), payload_(std::move(payload)) {
  if (!payload_fits(kind_, payload_))
    throw ValidationError("payload does not match model kind '" + std::string(model_kind_token(kind_)) + "'");
  const std::size_t n = std::visit([](const auto& s) { return set_size(s); }, payload_);
  if (n != categories_.size()) throw ValidationError("typicality model has a model count different from its categories");
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BaselineSet>) {
          if (s.baseline.categories != categories_ || s.stage1.categories != categories_)
            throw ValidationError("baseline categories differ from the model's");
        } else {
          check_categories(s.models, categories_);
        }
      },
      payload_);
}

std::optional<std::size_t> TypicalityModel::category_index(std::string_view name) const {
  for (std::size_t i = 0; i < categories_.size(); ++i)
    if (categories_[i] == name) return i;
  return std::nullopt;
}

TypicalityScore TypicalityModel::score(std::size_t category, std::span<const double> x) const {
  if (category >= categories_.size()) throw ValidationError("unknown category index " + std::to_string(category));
  std::vector<double> buffer;
  switch (kind_) {
    case ModelKind::baseline: {
      const auto& s = std::get<BaselineSet>(payload_);
      return baseline_typicality_score(s.baseline, s.stage1, x, category);
    }
    case ModelKind::naive_bayes:
      return nb_log_likelihood(std::get<NaiveBayesSet>(payload_).models[category], x);
    case ModelKind::naive_bayes_relevance: {
      const auto& s = std::get<NaiveBayesSet>(payload_);
      return nb_log_likelihood(s.models[category], x, relevance_row(*s.relevance, category, buffer));
    }
    case ModelKind::kde:
      return kde_log_likelihood(std::get<KdeSet>(payload_).models[category], x);
    case ModelKind::manifold_global:
      return manifold_distance_score(std::get<ManifoldSet>(payload_).models[category], x, DistanceMode::global);
    case ModelKind::manifold_local:
      return manifold_distance_score(std::get<ManifoldSet>(payload_).models[category], x, DistanceMode::local);
    case ModelKind::manifold_density: {
      const auto& s = std::get<ManifoldSet>(payload_);
      const auto w = s.weighted_density ? relevance_row(s.relevance, category, buffer) : std::span<const double>{};
      return manifold_density_log_likelihood(s.models[category], x, w);
    }
    case ModelKind::ocsvm:
      return ocsvm_decision_value(std::get<OcsvmSet>(payload_).models[category], x);
  }
  throw Error("unreachable model kind");
}

namespace {

/// Shares fits between kinds while a suite is trained.
class SuiteTrainer {
 public:
  SuiteTrainer(const Dataset& train, const TrainConfig& config, const MulticlassModel* stage1)
      : train_(train), config_(config), stage1_(stage1) {}

  TypicalityModel train(ModelKind kind) {
    const auto& cats = train_.category_names();
    switch (kind) {
      case ModelKind::baseline: {
        if (!stage1_) throw TrainingError("the confidence baseline needs a trained stage-1 model");
        return {kind, cats, BaselineSet{*stage1_, train_confidence_baseline(*stage1_, train_)}};
      }
      case ModelKind::naive_bayes: return {kind, cats, NaiveBayesSet{naive_bayes(), std::nullopt}};
      case ModelKind::naive_bayes_relevance: return {kind, cats, NaiveBayesSet{naive_bayes(), relevance()}};
      case ModelKind::kde: {
        KdeSet set;
        for (std::size_t c = 0; c < train_.num_categories(); ++c) set.models.push_back(fit_kde(train_, c, config_.kde));
        return {kind, cats, std::move(set)};
      }
      case ModelKind::manifold_global:
      case ModelKind::manifold_local:
      case ModelKind::manifold_density:
        return {kind, cats, ManifoldSet{manifolds(), relevance(), config_.weighted_manifold_density}};
      case ModelKind::ocsvm: {
        OcsvmSet set;
        for (std::size_t c = 0; c < train_.num_categories(); ++c)
          set.models.push_back(train_ocsvm(train_, c, config_.ocsvm));
        return {kind, cats, std::move(set)};
      }
    }
    throw Error("unreachable model kind");
  }

 private:
  const std::vector<GaussianNB>& naive_bayes() {
    if (!nb_) {
      nb_.emplace();
      for (std::size_t c = 0; c < train_.num_categories(); ++c) nb_->push_back(fit_naive_bayes(train_, c));
    }
    return *nb_;
  }

  const RelevanceWeights& relevance() {
    if (!relevance_) relevance_ = compute_relevance(train_, config_.relevance);
    return *relevance_;
  }

  const std::vector<ManifoldModel>& manifolds() {
    if (!manifolds_) {
      manifolds_.emplace();
      for (std::size_t c = 0; c < train_.num_categories(); ++c)
        manifolds_->push_back(build_manifold(train_, c, config_.manifold));
    }
    return *manifolds_;
  }

  const Dataset& train_;
  const TrainConfig& config_;
  const MulticlassModel* stage1_;
  std::optional<std::vector<GaussianNB>> nb_;
  std::optional<RelevanceWeights> relevance_;
  std::optional<std::vector<ManifoldModel>> manifolds_;
};

}  // namespace

TypicalityModel train_typicality_model(ModelKind kind, const Dataset& train, const TrainConfig& config,
                                       const MulticlassModel* stage1) {
  return SuiteTrainer(train, config, stage1).train(kind);
}

std::vector<TypicalityModel> train_models(const Dataset& train, std::span<const ModelKind> kinds,
                                          const TrainConfig& config, const MulticlassModel* stage1) {
  SuiteTrainer trainer(train, config, stage1);
  std::vector<TypicalityModel> models;
  for (ModelKind kind : kinds) models.push_back(trainer.train(kind));
  return models;
}

TrainedSuite train_suite(const Dataset& train, std::span<const ModelKind> kinds, const TrainConfig& config) {
  TrainedSuite suite;
  suite.stage1 = train_multiclass(train, config.stage1);
  suite.models = train_models(train, kinds, config, &suite.stage1);
  return suite;
}

void to_json(nlohmann::json& j, const TypicalityModel& m) {
  j = {{"kind", model_kind_token(m.kind())}, {"categories", m.categories()}};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NaiveBayesSet>) {
          j["naive_bayes"] = s.models;
          if (s.relevance) j["relevance"] = *s.relevance;
        } else if constexpr (std::is_same_v<T, KdeSet>) {
          j["kde"] = s.models;
        } else if constexpr (std::is_same_v<T, ManifoldSet>) {
          j["manifolds"] = s.models;
          j["relevance"] = s.relevance;
          j["weighted_density"] = s.weighted_density;
        } else if constexpr (std::is_same_v<T, OcsvmSet>) {
          j["ocsvm"] = s.models;
        } else {
          j["stage1"] = s.stage1;
          j["baseline"] = s.baseline;
        }
      },
      m.payload());
}

void from_json(const nlohmann::json& j, TypicalityModel& m) {
  const auto token = j.at("kind").get<std::string>();
  const auto kind = parse_model_kind(token);
  if (!kind) throw ModelFormatError("unknown typicality model kind '" + token + "'");
  auto categories = j.at("categories").get<std::vector<std::string>>();
  TypicalityModel::Payload payload;
  switch (*kind) {
    case ModelKind::baseline:
      payload = BaselineSet{j.at("stage1").get<MulticlassModel>(), j.at("baseline").get<BaselineTypicalityModel>()};
      break;
    case ModelKind::naive_bayes:
    case ModelKind::naive_bayes_relevance: {
      NaiveBayesSet s{j.at("naive_bayes").get<std::vector<GaussianNB>>(), std::nullopt};
      if (j.contains("relevance")) s.relevance = j["relevance"].get<RelevanceWeights>();
      payload = std::move(s);
      break;
    }
    case ModelKind::kde: payload = KdeSet{j.at("kde").get<std::vector<KDEModel>>()}; break;
    case ModelKind::manifold_global:
    case ModelKind::manifold_local:
    case ModelKind::manifold_density:
      payload = ManifoldSet{j.at("manifolds").get<std::vector<ManifoldModel>>(),
                            j.at("relevance").get<RelevanceWeights>(), j.at("weighted_density").get<bool>()};
      break;
    case ModelKind::ocsvm: payload = OcsvmSet{j.at("ocsvm").get<std::vector<OcsvmModel>>()}; break;
  }
  try {
    m = TypicalityModel(*kind, std::move(categories), std::move(payload));
  } catch (const ValidationError& e) {
    throw ModelFormatError(e.what());
  }
}

}  // namespace typicality
