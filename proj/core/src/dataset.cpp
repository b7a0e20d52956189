#include "typicality/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "typicality/csv.hpp"
#include "typicality/error.hpp"

namespace typicality {
namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

template <class Names>
void require_unique(const Names& names, std::string_view what) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw ValidationError("duplicate " + std::string(what) + " '" + n + "'");
}

struct RawRow {
  std::string id;
  std::string label;
  std::vector<double> values;
  TypicalityFlag flag;
};

Dataset assemble(std::vector<std::string> attributes, std::vector<RawRow> rows,
                 std::vector<std::string> file_categories, std::optional<AttributeGrouping> grouping,
                 const LoadOptions& options) {
  std::vector<std::string> categories = options.categories;
  if (categories.empty()) categories = std::move(file_categories);
  if (categories.empty()) {
    std::set<std::string> names;
    for (const auto& r : rows) names.insert(r.label);
    categories.assign(names.begin(), names.end());
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < categories.size(); ++i) index.emplace(categories[i], i);

  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (auto& r : rows) {
    auto it = index.find(r.label);
    if (it == index.end()) throw ValidationError("sample '" + r.id + "' has unknown category '" + r.label + "'");
    TypicalityFlag flag = r.flag;
    if (options.training && flag == TypicalityFlag::unlabeled) flag = TypicalityFlag::typical;
    samples.push_back(Sample{std::move(r.id), std::move(r.values), it->second, flag});
  }
  if (options.grouping_path) grouping = load_grouping(*options.grouping_path, attributes);
  if (!grouping) grouping = AttributeGrouping::single(attributes.size());
  return Dataset(std::move(attributes), std::move(categories), std::move(*grouping), std::move(samples));
}

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty file " + path.string());
  auto header = csv::split_record(lines[0]);
  if (header.size() < 3 || header[0] != "id" || header[1] != "label")
    throw ParseError("header must start with id,label followed by attribute names", 1);
  const bool has_flag = header.back() == "typicality";
  std::vector<std::string> attributes(header.begin() + 2, header.end() - (has_flag ? 1 : 0));
  if (attributes.empty()) throw ParseError("header declares no attributes", 1);

  std::vector<RawRow> rows;
  std::unordered_set<std::string> ids;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    if (lines[ln].empty()) continue;
    auto fields = csv::split_record(lines[ln]);
    const std::string row_tag = "row " + std::to_string(ln);
    if (fields.size() != header.size())
      throw ParseError(row_tag + ": expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    RawRow row;
    row.id = fields[0];
    row.label = fields[1];
    row.values.resize(attributes.size());
    for (std::size_t a = 0; a < attributes.size(); ++a) {
      double v = 0.0;
      if (!csv::parse_double(fields[a + 2], v))
        throw ParseError(row_tag + ": non-numeric value '" + fields[a + 2] + "' for attribute '" +
                             attributes[a] + "'",
                         line_no);
      if (!std::isfinite(v))
        throw ParseError(row_tag + ": non-finite value for attribute '" + attributes[a] + "'", line_no);
      row.values[a] = v;
    }
    row.flag = TypicalityFlag::unlabeled;
    if (has_flag) {
      auto flag = parse_flag(fields.back());
      if (!flag) throw ParseError(row_tag + ": unknown typicality '" + fields.back() + "'", line_no);
      row.flag = *flag;
    }
    if (!ids.insert(row.id).second) throw ValidationError("duplicate sample id '" + row.id + "'");
    rows.push_back(std::move(row));
  }
  return assemble(std::move(attributes), std::move(rows), {}, std::nullopt, options);
}

Dataset load_json(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
    auto attributes = doc.at("attributes").get<std::vector<std::string>>();
    std::vector<std::string> categories;
    if (doc.contains("categories")) categories = doc["categories"].get<std::vector<std::string>>();

    std::optional<AttributeGrouping> grouping;
    if (doc.contains("grouping")) {
      AttributeGrouping g;
      g.group_of.assign(attributes.size(), 0);
      std::vector<bool> seen(attributes.size(), false);
      for (const auto& entry : doc["grouping"]) {
        const auto attr = entry.at("attribute").get<std::string>();
        const auto group = entry.at("group").get<std::string>();
        auto a = std::find(attributes.begin(), attributes.end(), attr);
        if (a == attributes.end()) throw ValidationError("grouping names unknown attribute '" + attr + "'");
        auto gi = std::find(g.group_names.begin(), g.group_names.end(), group);
        if (gi == g.group_names.end()) {
          g.group_names.push_back(group);
          gi = g.group_names.end() - 1;
        }
        const auto ai = static_cast<std::size_t>(a - attributes.begin());
        if (seen[ai]) throw ValidationError("attribute '" + attr + "' grouped twice");
        seen[ai] = true;
        g.group_of[ai] = static_cast<std::size_t>(gi - g.group_names.begin());
      }
      if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw ValidationError("grouping does not cover every attribute");
      grouping = std::move(g);
    }

    std::vector<RawRow> rows;
    std::unordered_set<std::string> ids;
    std::size_t n = 0;
    for (const auto& s : doc.at("samples")) {
      ++n;
      RawRow row;
      row.id = s.at("id").get<std::string>();
      row.label = s.at("label").get<std::string>();
      row.values = s.at("values").get<std::vector<double>>();
      if (row.values.size() != attributes.size())
        throw ParseError("row " + std::to_string(n) + ": expected " + std::to_string(attributes.size()) +
                         " values, found " + std::to_string(row.values.size()));
      row.flag = TypicalityFlag::unlabeled;
      if (s.contains("typicality")) {
        auto flag = parse_flag(s["typicality"].get<std::string>());
        if (!flag) throw ParseError("row " + std::to_string(n) + ": unknown typicality");
        row.flag = *flag;
      }
      if (!ids.insert(row.id).second) throw ValidationError("duplicate sample id '" + row.id + "'");
      rows.push_back(std::move(row));
    }
    return assemble(std::move(attributes), std::move(rows), std::move(categories), std::move(grouping),
                    options);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string_view flag_name(TypicalityFlag flag) {
  switch (flag) {
    case TypicalityFlag::typical: return "typical";
    case TypicalityFlag::abnormal: return "abnormal";
    case TypicalityFlag::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::optional<TypicalityFlag> parse_flag(std::string_view text) {
  if (text == "typical") return TypicalityFlag::typical;
  if (text == "abnormal") return TypicalityFlag::abnormal;
  if (text == "unlabeled" || text.empty()) return TypicalityFlag::unlabeled;
  return std::nullopt;
}

std::vector<std::size_t> AttributeGrouping::members(std::size_t group) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < group_of.size(); ++i)
    if (group_of[i] == group) out.push_back(i);
  return out;
}

AttributeGrouping AttributeGrouping::single(std::size_t num_attributes) {
  return AttributeGrouping{{"all"}, std::vector<std::size_t>(num_attributes, 0)};
}

Dataset::Dataset(std::vector<std::string> attribute_names, std::vector<std::string> category_names,
                 AttributeGrouping grouping, std::vector<Sample> samples)
    : attribute_names_(std::move(attribute_names)),
      category_names_(std::move(category_names)),
      grouping_(std::move(grouping)),
      samples_(std::move(samples)) {
  const std::size_t m = attribute_names_.size();
  if (m == 0) throw ValidationError("dataset has no attributes");
  require_unique(attribute_names_, "attribute");
  require_unique(category_names_, "category");
  if (grouping_.group_names.empty()) throw ValidationError("grouping uses no groups");
  require_unique(grouping_.group_names, "group");
  if (grouping_.group_of.size() != m)
    throw ValidationError("grouping covers " + std::to_string(grouping_.group_of.size()) + " attributes, dataset has " +
                          std::to_string(m));
  for (std::size_t g : grouping_.group_of)
    if (g >= grouping_.group_names.size()) throw ValidationError("grouping refers to an undefined group");

  std::unordered_set<std::string> ids;
  for (const auto& s : samples_) {
    if (s.values.size() != m)
      throw ValidationError("sample '" + s.id + "' has " + std::to_string(s.values.size()) + " values, expected " +
                            std::to_string(m));
    for (double v : s.values)
      if (!std::isfinite(v)) throw ValidationError("sample '" + s.id + "' has a non-finite value");
    if (s.label >= category_names_.size())
      throw ValidationError("sample '" + s.id + "' has label index out of range");
    if (!ids.insert(s.id).second) throw ValidationError("duplicate sample id '" + s.id + "'");
  }
}

std::optional<std::size_t> Dataset::category_index(std::string_view name) const {
  for (std::size_t i = 0; i < category_names_.size(); ++i)
    if (category_names_[i] == name) return i;
  return std::nullopt;
}

CategoryLabel Dataset::category(std::size_t index) const {
  if (index >= category_names_.size()) throw ValidationError("category index out of range");
  return CategoryLabel{index, category_names_[index]};
}

std::vector<std::span<const double>> Dataset::typical_rows(std::size_t category) const {
  std::vector<std::span<const double>> rows;
  for (const auto& s : samples_)
    if (s.label == category && s.flag == TypicalityFlag::typical) rows.emplace_back(s.values);
  return rows;
}

std::size_t Dataset::count_typical(std::size_t category) const {
  return static_cast<std::size_t>(std::count_if(samples_.begin(), samples_.end(), [&](const Sample& s) {
    return s.label == category && s.flag == TypicalityFlag::typical;
  }));
}

Dataset Dataset::with_grouping(AttributeGrouping grouping) const {
  return Dataset(attribute_names_, category_names_, std::move(grouping), samples_);
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.attribute_names_ != b.attribute_names_ || a.category_names_ != b.category_names_ ||
      !(a.grouping_ == b.grouping_) || a.samples_.size() != b.samples_.size())
    return false;
  for (std::size_t i = 0; i < a.samples_.size(); ++i) {
    const auto& x = a.samples_[i];
    const auto& y = b.samples_[i];
    if (x.id != y.id || x.values != y.values || x.label != y.label || x.flag != y.flag) return false;
  }
  return true;
}

DataFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? DataFormat::json : DataFormat::csv;
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format, const LoadOptions& options) {
  return format == DataFormat::json ? load_json(path, options) : load_csv(path, options);
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  return load_dataset(path, format_from_path(path), options);
}

void save_dataset(const Dataset& data, const std::filesystem::path& path, DataFormat format) {
  if (format == DataFormat::json) {
    nlohmann::json doc;
    doc["attributes"] = data.attribute_names();
    doc["categories"] = data.category_names();
    nlohmann::json grouping = nlohmann::json::array();
    for (std::size_t a = 0; a < data.num_attributes(); ++a)
      grouping.push_back({{"attribute", data.attribute_names()[a]},
                          {"group", data.grouping().group_names[data.grouping().group_of[a]]}});
    doc["grouping"] = std::move(grouping);
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : data.samples())
      samples.push_back({{"id", s.id},
                         {"label", data.category_names()[s.label]},
                         {"values", s.values},
                         {"typicality", flag_name(s.flag)}});
    doc["samples"] = std::move(samples);
    write_text(path, doc.dump(1) + "\n");
    return;
  }
  std::ostringstream out;
  std::vector<std::string> header{"id", "label"};
  header.insert(header.end(), data.attribute_names().begin(), data.attribute_names().end());
  header.emplace_back("typicality");
  out << csv::join_record(header) << '\n';
  for (const auto& s : data.samples()) {
    std::vector<std::string> fields{s.id, data.category_names()[s.label]};
    for (double v : s.values) fields.push_back(csv::format_double(v));
    fields.emplace_back(flag_name(s.flag));
    out << csv::join_record(fields) << '\n';
  }
  write_text(path, out.str());
}

AttributeGrouping load_grouping(const std::filesystem::path& path,
                                const std::vector<std::string>& attribute_names) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty grouping file " + path.string());
  const auto header = csv::split_record(lines[0]);
  if (header.size() != 2 || header[0] != "attribute" || header[1] != "group")
    throw ParseError("grouping header must be attribute,group", 1);
  AttributeGrouping g;
  g.group_of.assign(attribute_names.size(), 0);
  std::vector<bool> seen(attribute_names.size(), false);
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto fields = csv::split_record(lines[ln]);
    if (fields.size() != 2) throw ParseError("expected attribute,group", ln + 1);
    auto a = std::find(attribute_names.begin(), attribute_names.end(), fields[0]);
    if (a == attribute_names.end())
      throw ValidationError("grouping names unknown attribute '" + fields[0] + "'");
    const auto ai = static_cast<std::size_t>(a - attribute_names.begin());
    if (seen[ai]) throw ValidationError("attribute '" + fields[0] + "' grouped twice");
    seen[ai] = true;
    auto gi = std::find(g.group_names.begin(), g.group_names.end(), fields[1]);
    if (gi == g.group_names.end()) {
      g.group_names.push_back(fields[1]);
      gi = g.group_names.end() - 1;
    }
    g.group_of[ai] = static_cast<std::size_t>(gi - g.group_names.begin());
  }
  for (std::size_t a = 0; a < seen.size(); ++a)
    if (!seen[a]) throw ValidationError("grouping does not assign attribute '" + attribute_names[a] + "'");
  return g;
}

void save_grouping(const AttributeGrouping& grouping, const std::vector<std::string>& attribute_names,
                   const std::filesystem::path& path) {
  std::ostringstream out;
  out << "attribute,group\n";
  for (std::size_t a = 0; a < attribute_names.size(); ++a)
    out << csv::join_record({attribute_names[a], grouping.group_names.at(grouping.group_of.at(a))}) << '\n';
  write_text(path, out.str());
}

RatingTable load_ratings(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty ratings file " + path.string());
  const auto header = csv::split_record(lines[0]);
  if (header.size() < 2 || header[0] != "id") throw ParseError("ratings header must be id,<groups...>", 1);
  RatingTable table;
  table.group_names.assign(header.begin() + 1, header.end());
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto fields = csv::split_record(lines[ln]);
    if (fields.size() != header.size()) throw ParseError("wrong number of fields", ln + 1);
    std::vector<double> r(table.group_names.size());
    double total = 0.0;
    for (std::size_t g = 0; g < r.size(); ++g) {
      if (!csv::parse_double(fields[g + 1], r[g]) || !std::isfinite(r[g]) || r[g] < 0.0)
        throw ParseError("ratings must be finite and nonnegative", ln + 1);
      total += r[g];
    }
    if (total <= 0.0) throw ParseError("ratings row for '" + fields[0] + "' is all zero", ln + 1);
    for (double& v : r) v /= total;
    if (!table.ratings.emplace(fields[0], std::move(r)).second)
      throw ValidationError("duplicate rating id '" + fields[0] + "'");
  }
  return table;
}

void save_ratings(const RatingTable& table, const std::filesystem::path& path) {
  std::vector<std::string> ids;
  ids.reserve(table.ratings.size());
  for (const auto& [id, _] : table.ratings) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  std::ostringstream out;
  std::vector<std::string> header{"id"};
  header.insert(header.end(), table.group_names.begin(), table.group_names.end());
  out << csv::join_record(header) << '\n';
  for (const auto& id : ids) {
    std::vector<std::string> fields{id};
    for (double v : table.ratings.at(id)) fields.push_back(csv::format_double(v));
    out << csv::join_record(fields) << '\n';
  }
  write_text(path, out.str());
}

}  // namespace typicality
