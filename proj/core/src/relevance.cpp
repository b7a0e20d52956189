#include "typicality/relevance.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "typicality/error.hpp"
#include "typicality/model_io.hpp"

namespace typicality {
namespace {

double histogram_entropy(std::span<const double> samples, int bins, double lo, double hi) {
  if (hi <= lo) return 0.0;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double v : samples) {
    auto b = static_cast<long>(std::floor((v - lo) * scale));
    b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  const double n = static_cast<double>(samples.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

}  // namespace

std::vector<double> RelevanceWeights::row(std::size_t category) const {
  if (category >= static_cast<std::size_t>(weights.rows())) throw ValidationError("relevance category out of range");
  const Eigen::VectorXd r = weights.row(static_cast<Eigen::Index>(category)).transpose();
  return std::vector<double>(r.data(), r.data() + r.size());
}

double estimate_entropy(std::span<const double> samples, int bins) {
  if (samples.empty()) throw Error("entropy of an empty sample");
  if (bins < 2) throw Error("entropy needs at least two bins");
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  return histogram_entropy(samples, bins, *lo, *hi);
}

RelevanceWeights compute_relevance(const Dataset& train, const RelevanceOptions& options) {
  if (options.bins < 2) throw TrainingError("relevance needs at least two bins");
  if (!(options.entropy_floor > 0.0)) throw TrainingError("entropy floor must be positive");
  const auto k = static_cast<Eigen::Index>(train.num_categories());
  const auto m = static_cast<Eigen::Index>(train.num_attributes());
  RelevanceWeights out;
  out.categories = train.category_names();
  out.bins = options.bins;
  out.entropy_floor = options.entropy_floor;
  out.weights.resize(k, m);
  out.entropy.resize(k, m);
  out.range_lo.resize(k, m);
  out.range_hi.resize(k, m);

  std::vector<double> column;
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto rows = train.typical_rows(static_cast<std::size_t>(c));
    if (rows.size() < 2)
      throw TrainingError("category '" + train.category_names()[static_cast<std::size_t>(c)] + "' has " +
                          std::to_string(rows.size()) + " typical samples; need at least 2");
    for (Eigen::Index a = 0; a < m; ++a) {
      column.clear();
      for (auto r : rows) column.push_back(r[static_cast<std::size_t>(a)]);
      const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
      const double h = histogram_entropy(column, options.bins, *lo, *hi);
      out.range_lo(c, a) = *lo;
      out.range_hi(c, a) = *hi;
      out.entropy(c, a) = h;
      out.weights(c, a) = 1.0 / std::max(h, options.entropy_floor);
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const RelevanceWeights& w) {
  j = {{"categories", w.categories},
       {"weights", json_io::from_matrix(w.weights)},
       {"entropy", json_io::from_matrix(w.entropy)},
       {"range_lo", json_io::from_matrix(w.range_lo)},
       {"range_hi", json_io::from_matrix(w.range_hi)},
       {"bins", w.bins},
       {"entropy_floor", w.entropy_floor}};
}

void from_json(const nlohmann::json& j, RelevanceWeights& w) {
  w.categories = j.at("categories").get<std::vector<std::string>>();
  w.weights = json_io::to_matrix(j.at("weights"));
  w.entropy = json_io::to_matrix(j.at("entropy"));
  w.range_lo = json_io::to_matrix(j.at("range_lo"));
  w.range_hi = json_io::to_matrix(j.at("range_hi"));
  w.bins = j.at("bins").get<int>();
  w.entropy_floor = j.at("entropy_floor").get<double>();
  if (static_cast<std::size_t>(w.weights.rows()) != w.categories.size())
    throw ModelFormatError("relevance weights do not match the category list");
}

}  // namespace typicality
