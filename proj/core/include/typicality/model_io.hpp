#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace typicality {

inline constexpr int kModelFormatVersion = 1;

/// Writes {"format_version", "kind", "model"} as a single JSON document.
void write_model_document(const std::filesystem::path& path, std::string_view kind,
                          const nlohmann::json& model);

/// Reads a model document and returns its "model" member. Throws ModelFormatError
/// on unreadable or truncated files, a different format_version, or (when
/// `expected_kind` is non-empty) a different kind.
nlohmann::json read_model_document(const std::filesystem::path& path, std::string_view expected_kind);

/// The "kind" recorded in a model file.
std::string peek_model_kind(const std::filesystem::path& path);

[[noreturn]] void throw_model_format(const std::filesystem::path& path, std::string_view detail);

/// Any model type exposing `kModelKind` and nlohmann to_json/from_json.
template <class Model>
void save_model(const Model& model, const std::filesystem::path& path) {
  write_model_document(path, Model::kModelKind, nlohmann::json(model));
}

template <class Model>
Model load_model(const std::filesystem::path& path) {
  const nlohmann::json doc = read_model_document(path, Model::kModelKind);
  try {
    return doc.get<Model>();
  } catch (const nlohmann::json::exception& e) {
    throw_model_format(path, e.what());
  }
}

namespace json_io {

nlohmann::json from_vector(const Eigen::VectorXd& v);
Eigen::VectorXd to_vector(const nlohmann::json& j);
/// Row-major array of arrays.
nlohmann::json from_matrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd to_matrix(const nlohmann::json& j);

}  // namespace json_io
}  // namespace typicality
