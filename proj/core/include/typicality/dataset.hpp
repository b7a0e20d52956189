#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "typicality/types.hpp"

namespace typicality {

enum class TypicalityFlag { typical, abnormal, unlabeled };

std::string_view flag_name(TypicalityFlag flag);
std::optional<TypicalityFlag> parse_flag(std::string_view text);

/// One image: its attribute confidences, category and typicality tag.
struct Sample {
  std::string id;
  std::vector<double> values;
  std::size_t label = 0;
  TypicalityFlag flag = TypicalityFlag::typical;
};

/// Exclusive assignment of attributes to named groups (shape, texture, ...).
struct AttributeGrouping {
  std::vector<std::string> group_names;
  std::vector<std::size_t> group_of;  ///< attribute index -> group index

  std::size_t num_groups() const { return group_names.size(); }
  std::vector<std::size_t> members(std::size_t group) const;

  /// Every attribute in a single group named "all".
  static AttributeGrouping single(std::size_t num_attributes);

  friend bool operator==(const AttributeGrouping&, const AttributeGrouping&) = default;
};

/// Immutable, validated collection of labeled attribute vectors.
class Dataset {
 public:
  /// Throws ValidationError when any invariant fails: vector length, finiteness,
  /// label range, duplicate ids or names, or a grouping that is not total.
  Dataset(std::vector<std::string> attribute_names, std::vector<std::string> category_names,
          AttributeGrouping grouping, std::vector<Sample> samples);

  std::size_t num_attributes() const { return attribute_names_.size(); }
  std::size_t num_categories() const { return category_names_.size(); }
  std::size_t size() const { return samples_.size(); }

  const std::vector<std::string>& attribute_names() const { return attribute_names_; }
  const std::vector<std::string>& category_names() const { return category_names_; }
  const AttributeGrouping& grouping() const { return grouping_; }
  const std::vector<Sample>& samples() const { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

  std::optional<std::size_t> category_index(std::string_view name) const;
  CategoryLabel category(std::size_t index) const;

  /// Attribute vectors of the typical samples labeled `category`, in dataset order.
  std::vector<std::span<const double>> typical_rows(std::size_t category) const;
  std::size_t count_typical(std::size_t category) const;

  /// Copy with a different grouping (the sidecar is loaded separately from the rows).
  Dataset with_grouping(AttributeGrouping grouping) const;

  friend bool operator==(const Dataset&, const Dataset&);

 private:
  std::vector<std::string> attribute_names_;
  std::vector<std::string> category_names_;
  AttributeGrouping grouping_;
  std::vector<Sample> samples_;
};

enum class DataFormat { csv, json };

/// Guesses from the extension: ".json" is JSON, anything else CSV.
DataFormat format_from_path(const std::filesystem::path& path);

struct LoadOptions {
  /// Attribute -> group sidecar. Without one, all attributes share one group
  /// (JSON datasets may carry their own grouping, which the sidecar overrides).
  std::optional<std::filesystem::path> grouping_path;
  /// Treat `unlabeled` rows as `typical` (training splits).
  bool training = false;
  /// Fixes the category order; labels outside it are rejected. Empty means
  /// the sorted set of labels found in the file.
  std::vector<std::string> categories;
};

Dataset load_dataset(const std::filesystem::path& path, DataFormat format,
                     const LoadOptions& options = {});
Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});

/// CSV writes only the rows; pair it with save_grouping for the sidecar.
void save_dataset(const Dataset& data, const std::filesystem::path& path, DataFormat format);

AttributeGrouping load_grouping(const std::filesystem::path& path,
                                const std::vector<std::string>& attribute_names);
void save_grouping(const AttributeGrouping& grouping,
                   const std::vector<std::string>& attribute_names,
                   const std::filesystem::path& path);

/// Per-image ground-truth distribution over attribute groups (e.g. mean human ratings).
struct RatingTable {
  std::vector<std::string> group_names;
  std::unordered_map<std::string, std::vector<double>> ratings;  ///< id -> normalized ratings
};

/// CSV header: id,<group names...>. Rows are normalized to sum to one;
/// an all-zero or negative row is a parse error.
RatingTable load_ratings(const std::filesystem::path& path);
void save_ratings(const RatingTable& table, const std::filesystem::path& path);

}  // namespace typicality
