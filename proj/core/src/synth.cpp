#include "typicality/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "typicality/error.hpp"

namespace typicality {

std::string_view abnormality_name(AbnormalityType type) {
  switch (type) {
    case AbnormalityType::attribute_shift: return "shift";
    case AbnormalityType::subspace_offset: return "offset";
    case AbnormalityType::category_mixing: return "mixing";
  }
  return "shift";
}

std::optional<AbnormalityType> parse_abnormality(std::string_view text) {
  for (auto t : {AbnormalityType::attribute_shift, AbnormalityType::subspace_offset, AbnormalityType::category_mixing})
    if (abnormality_name(t) == text) return t;
  return std::nullopt;
}

namespace {

constexpr const char* kGroupNames[] = {"shape", "texture", "color", "pose"};
constexpr const char* kCategoryNames[] = {"airplane", "boat", "car", "chair", "motorbike", "sofa"};

void validate(const SynthConfig& c) {
  auto fail = [](const std::string& msg) { throw ValidationError("synthetic config: " + msg); };
  if (c.categories == 0) fail("need at least one category");
  if (c.attributes == 0) fail("need at least one attribute");
  if (c.groups == 0 || c.groups > c.attributes) fail("groups must be between 1 and the attribute count");
  if (c.manifold_dim >= c.attributes) fail("manifold dimension must be below the attribute count");
  const std::size_t smallest_group = c.attributes / c.groups;
  if (c.manifold_attributes_per_group >= smallest_group)
    fail("each group needs at least one attribute off the manifold");
  if (c.manifold_attributes_per_group * c.groups < c.manifold_dim)
    fail("too few manifold attributes for the manifold dimension");
  if (c.test_abnormal_per_category > 0) {
    if (c.abnormalities.empty()) fail("abnormal samples requested without an abnormality type");
    if (c.shifted_attributes == 0 || c.shifted_attributes > smallest_group - c.manifold_attributes_per_group)
      fail("shifted attribute count must fit in a group's off-manifold attributes");
    const bool mixing = std::find(c.abnormalities.begin(), c.abnormalities.end(), AbnormalityType::category_mixing) !=
                        c.abnormalities.end();
    if (mixing && c.categories < 2) fail("category mixing needs two categories");
  }
  if (!(c.noise_sd > 0.0) || !(c.spread >= 0.0) || !(c.mean_range >= 0.0) || !(c.shift >= 0.0))
    fail("scales must be non-negative and noise_sd positive");
}

class Generator {
 public:
  Generator(const SynthConfig& config, std::uint64_t seed) : cfg_(config), rng_(seed) {
    const std::size_t m = cfg_.attributes;
    grouping_.group_of.resize(m);
    for (std::size_t g = 0; g < cfg_.groups; ++g)
      grouping_.group_names.push_back(cfg_.groups <= std::size(kGroupNames) ? kGroupNames[g]
                                                                             : "group" + std::to_string(g));
    // Contiguous blocks; the first (M mod G) groups get one extra attribute.
    const std::size_t base = m / cfg_.groups, extra = m % cfg_.groups;
    std::size_t a = 0;
    for (std::size_t g = 0; g < cfg_.groups; ++g) {
      const std::size_t size = base + (g < extra ? 1 : 0);
      for (std::size_t j = 0; j < size; ++j, ++a) {
        grouping_.group_of[a] = g;
        attribute_names_.push_back(grouping_.group_names[g] + "_" + std::to_string(j));
      }
    }
    for (std::size_t c = 0; c < cfg_.categories; ++c)
      category_names_.push_back(cfg_.categories <= std::size(kCategoryNames) ? kCategoryNames[c]
                                                                             : "category" + std::to_string(c));
    for (std::size_t c = 0; c < cfg_.categories; ++c) planted_.push_back(plant_category());
  }

  SyntheticSet run() {
    std::vector<Sample> train, test;
    RatingTable ratings;
    ratings.group_names = grouping_.group_names;
    std::vector<PlantedAbnormality> abnormal;
    for (std::size_t c = 0; c < cfg_.categories; ++c)
      for (std::size_t i = 0; i < cfg_.train_per_category; ++i)
        train.push_back({"train-" + category_names_[c] + "-" + std::to_string(i), typical(c), c,
                         TypicalityFlag::typical});
    for (std::size_t c = 0; c < cfg_.categories; ++c) {
      for (std::size_t i = 0; i < cfg_.test_typical_per_category; ++i)
        test.push_back({"test-" + category_names_[c] + "-" + std::to_string(i), typical(c), c,
                        TypicalityFlag::typical});
      for (std::size_t i = 0; i < cfg_.test_abnormal_per_category; ++i) {
        PlantedAbnormality p;
        p.id = "test-" + category_names_[c] + "-" + std::to_string(cfg_.test_typical_per_category + i);
        p.category = c;
        p.type = cfg_.abnormalities[i % cfg_.abnormalities.size()];
        p.group = uniform_index(cfg_.groups);
        test.push_back({p.id, make_abnormal(c, p), c, TypicalityFlag::abnormal});
        std::vector<double> onehot(cfg_.groups, 0.0);
        onehot[p.group] = 1.0;
        ratings.ratings.emplace(p.id, std::move(onehot));
        abnormal.push_back(std::move(p));
      }
    }
    return SyntheticSet{Dataset(attribute_names_, category_names_, grouping_, std::move(train)),
                        Dataset(attribute_names_, category_names_, grouping_, std::move(test)), std::move(ratings),
                        planted_, std::move(abnormal)};
  }

 private:
  std::size_t uniform_index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  double normal() { return normal_(rng_); }

  std::vector<std::size_t> members(std::size_t g) const { return grouping_.members(g); }

  std::vector<std::size_t> off_manifold(std::size_t c, std::size_t g) const {
    std::vector<std::size_t> out;
    const auto& on = planted_[c].manifold_attributes;
    for (std::size_t a : members(g))
      if (std::find(on.begin(), on.end(), a) == on.end()) out.push_back(a);
    return out;
  }

  PlantedCategory plant_category() {
    PlantedCategory p;
    const auto m = static_cast<Eigen::Index>(cfg_.attributes);
    std::uniform_real_distribution<double> mean_dist(-cfg_.mean_range, cfg_.mean_range);
    p.mean.resize(m);
    for (Eigen::Index a = 0; a < m; ++a) p.mean(a) = mean_dist(rng_);
    for (std::size_t g = 0; g < cfg_.groups; ++g) {
      auto mem = members(g);
      std::shuffle(mem.begin(), mem.end(), rng_);
      mem.resize(cfg_.manifold_attributes_per_group);
      p.manifold_attributes.insert(p.manifold_attributes.end(), mem.begin(), mem.end());
    }
    std::sort(p.manifold_attributes.begin(), p.manifold_attributes.end());
    const auto n_on = static_cast<Eigen::Index>(p.manifold_attributes.size());
    const auto d = static_cast<Eigen::Index>(cfg_.manifold_dim);
    Eigen::MatrixXd raw(n_on, d);
    for (Eigen::Index i = 0; i < n_on; ++i)
      for (Eigen::Index j = 0; j < d; ++j) raw(i, j) = normal();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() * Eigen::MatrixXd::Identity(n_on, d);
    p.basis = Eigen::MatrixXd::Zero(m, d);
    for (Eigen::Index i = 0; i < n_on; ++i) p.basis.row(static_cast<Eigen::Index>(p.manifold_attributes[i])) = q.row(i);
    return p;
  }

  std::vector<double> typical(std::size_t c) {
    const auto& p = planted_[c];
    Eigen::VectorXd z(static_cast<Eigen::Index>(cfg_.manifold_dim));
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = cfg_.spread * normal();
    const Eigen::VectorXd on = p.mean + p.basis * z;
    std::vector<double> x(cfg_.attributes);
    for (std::size_t a = 0; a < x.size(); ++a) x[a] = on(static_cast<Eigen::Index>(a)) + cfg_.noise_sd * normal();
    return x;
  }

  std::vector<double> make_abnormal(std::size_t c, const PlantedAbnormality& p) {
    std::vector<double> x = typical(c);
    const double step = cfg_.shift * cfg_.noise_sd;
    switch (p.type) {
      case AbnormalityType::attribute_shift: {
        auto off = off_manifold(c, p.group);
        std::shuffle(off.begin(), off.end(), rng_);
        for (std::size_t j = 0; j < cfg_.shifted_attributes; ++j)
          x[off[j]] += (uniform_index(2) == 0 ? -step : step);
        break;
      }
      case AbnormalityType::subspace_offset: {
        // Moves the group's manifold attributes in the direction that stays
        // most orthogonal to the planted subspace: each value remains plausible
        // on its own, but the configuration leaves the manifold. Same norm as
        // an attribute shift.
        std::vector<std::size_t> on;
        for (std::size_t a : planted_[c].manifold_attributes)
          if (grouping_.group_of[a] == p.group) on.push_back(a);
        if (on.empty()) on = off_manifold(c, p.group);
        const auto n = static_cast<Eigen::Index>(on.size());
        Eigen::MatrixXd rows(n, planted_[c].basis.cols());
        for (Eigen::Index i = 0; i < n; ++i) rows.row(i) = planted_[c].basis.row(static_cast<Eigen::Index>(on[i]));
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rows * rows.transpose());
        Eigen::VectorXd dir = eig.eigenvectors().col(0);
        if (uniform_index(2) == 0) dir = -dir;
        const double length = step * std::sqrt(static_cast<double>(cfg_.shifted_attributes));
        for (Eigen::Index i = 0; i < n; ++i) x[on[static_cast<std::size_t>(i)]] += length * dir(i);
        break;
      }
      case AbnormalityType::category_mixing: {
        std::size_t other = uniform_index(cfg_.categories - 1);
        if (other >= c) ++other;
        const auto donor = typical(other);
        for (std::size_t a : members(p.group)) x[a] = donor[a];
        break;
      }
    }
    return x;
  }

  const SynthConfig& cfg_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  AttributeGrouping grouping_;
  std::vector<std::string> attribute_names_;
  std::vector<std::string> category_names_;
  std::vector<PlantedCategory> planted_;
};

}  // namespace

SyntheticSet synth_generate(const SynthConfig& config, std::uint64_t seed) {
  validate(config);
  return Generator(config, seed).run();
}

}  // namespace typicality
