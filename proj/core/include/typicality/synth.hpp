#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "typicality/dataset.hpp"

namespace typicality {

/// How an abnormal test sample departs from its category.
enum class AbnormalityType {
  attribute_shift,  ///< a few noise-only attributes of one group moved by +-shift sd
  subspace_offset,  ///< one group's manifold attributes moved off the planted subspace
  category_mixing,  ///< one group copied from a typical sample of another category
};

std::string_view abnormality_name(AbnormalityType type);
std::optional<AbnormalityType> parse_abnormality(std::string_view text);

/// Typical samples lie on a per-category d-dimensional affine subspace spanned
/// by a few "manifold" attributes in each group, plus isotropic noise on every
/// attribute. Groups are contiguous attribute blocks.
struct SynthConfig {
  std::size_t categories = 4;
  std::size_t attributes = 24;
  std::size_t groups = 4;
  std::size_t manifold_dim = 3;
  std::size_t manifold_attributes_per_group = 2;
  std::size_t train_per_category = 200;
  std::size_t test_typical_per_category = 50;
  std::size_t test_abnormal_per_category = 50;
  double noise_sd = 0.15;
  double spread = 1.0;      ///< sd of the latent manifold coordinates
  double mean_range = 1.5;  ///< category means drawn uniformly from [-range, range]
  double shift = 5.0;       ///< abnormal displacement, in units of noise_sd per attribute
  std::size_t shifted_attributes = 4;
  /// Assigned round-robin to the abnormal samples of each category.
  std::vector<AbnormalityType> abnormalities = {AbnormalityType::attribute_shift, AbnormalityType::subspace_offset,
                                                AbnormalityType::category_mixing};
};

/// Ground truth for one category.
struct PlantedCategory {
  Eigen::VectorXd mean;
  std::vector<std::size_t> manifold_attributes;
  Eigen::MatrixXd basis;  ///< M x d, orthonormal columns, zero outside manifold_attributes
};

struct PlantedAbnormality {
  std::string id;
  std::size_t category = 0;
  std::size_t group = 0;
  AbnormalityType type = AbnormalityType::attribute_shift;
};

struct SyntheticSet {
  Dataset train;
  Dataset test;
  RatingTable ratings;  ///< one-hot on the planted group, for every abnormal test sample
  std::vector<PlantedCategory> categories;
  std::vector<PlantedAbnormality> abnormal;
};

/// Deterministic for a given config and seed. Throws ValidationError on an
/// inconsistent config (for example manifold_dim >= attributes).
SyntheticSet synth_generate(const SynthConfig& config, std::uint64_t seed);

}  // namespace typicality
