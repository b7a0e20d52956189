#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "typicality/classify.hpp"
#include "typicality/model_set.hpp"

namespace typicality::cli {

/// What `train` writes and the other subcommands read: an optional stage-1
/// classifier and any number of typicality models.
struct ModelBundle {
  static constexpr const char* kModelKind = "model_bundle";

  std::optional<MulticlassModel> stage1;
  std::vector<TypicalityModel> models;

  /// Throws ValidationError when the bundle has no stage-1 classifier.
  const MulticlassModel& require_stage1() const;
};

void to_json(nlohmann::json& j, const ModelBundle& b);
void from_json(const nlohmann::json& j, ModelBundle& b);

}  // namespace typicality::cli
