#include "bundle.hpp"

#include <nlohmann/json.hpp>

#include "typicality/error.hpp"

namespace typicality::cli {

const MulticlassModel& ModelBundle::require_stage1() const {
  if (!stage1) throw ValidationError("model bundle has no stage-1 classifier (train it with --stage1)");
  return *stage1;
}

void to_json(nlohmann::json& j, const ModelBundle& b) {
  j = nlohmann::json::object();
  j["stage1"] = b.stage1 ? nlohmann::json(*b.stage1) : nlohmann::json(nullptr);
  j["models"] = b.models;
}

void from_json(const nlohmann::json& j, ModelBundle& b) {
  const auto& s = j.at("stage1");
  b.stage1 = s.is_null() ? std::nullopt : std::optional<MulticlassModel>(s.get<MulticlassModel>());
  b.models = j.at("models").get<std::vector<TypicalityModel>>();
}

}  // namespace typicality::cli
