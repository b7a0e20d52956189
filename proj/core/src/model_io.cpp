#include "typicality/model_io.hpp"

#include <fstream>
#include <sstream>

#include "typicality/error.hpp"

namespace typicality {

void write_model_document(const std::filesystem::path& path, std::string_view kind,
                          const nlohmann::json& model) {
  nlohmann::json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = std::string(kind);
  doc["model"] = model;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write model file " + path.string());
  out << doc.dump() << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

namespace {

nlohmann::json read_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open model file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw_model_format(path, e.what());
  }
  if (!doc.is_object() || !doc.contains("format_version") || !doc.contains("kind") || !doc.contains("model"))
    throw_model_format(path, "missing format_version, kind or model");
  if (!doc["format_version"].is_number_integer() || doc["format_version"].get<int>() != kModelFormatVersion)
    throw ModelFormatError(path.string() + ": unsupported format_version " + doc["format_version"].dump() +
                           " (expected " + std::to_string(kModelFormatVersion) + ")");
  if (!doc["kind"].is_string()) throw_model_format(path, "kind is not a string");
  return doc;
}

}  // namespace

nlohmann::json read_model_document(const std::filesystem::path& path, std::string_view expected_kind) {
  nlohmann::json doc = read_document(path);
  const auto kind = doc["kind"].get<std::string>();
  if (!expected_kind.empty() && kind != expected_kind)
    throw ModelFormatError(path.string() + ": holds a '" + kind + "' model, expected '" +
                           std::string(expected_kind) + "'");
  return std::move(doc["model"]);
}

std::string peek_model_kind(const std::filesystem::path& path) {
  return read_document(path)["kind"].get<std::string>();
}

void throw_model_format(const std::filesystem::path& path, std::string_view detail) {
  throw ModelFormatError("malformed model file " + path.string() + ": " + std::string(detail));
}

namespace json_io {

nlohmann::json from_vector(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd to_vector(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

nlohmann::json from_matrix(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(std::move(row));
  }
  nlohmann::json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["data"] = std::move(rows);
  return out;
}

Eigen::MatrixXd to_matrix(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows) throw ModelFormatError("matrix row count mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = data[static_cast<std::size_t>(r)].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw ModelFormatError("matrix column count mismatch");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

}  // namespace json_io
}  // namespace typicality
