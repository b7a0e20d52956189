#include "typicality/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "typicality/error.hpp"
#include "typicality/model_io.hpp"
#include "typicality/stats.hpp"

namespace typicality {
namespace {

std::vector<double> column(std::span<const std::span<const double>> rows, std::size_t a) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(r[a]);
  return out;
}

std::size_t common_width(std::span<const std::span<const double>> rows) {
  const std::size_t m = rows.front().size();
  for (auto r : rows) check_dimension(m, r.size());
  return m;
}

}  // namespace

GaussianNB fit_naive_bayes(const Dataset& train, std::size_t category) {
  const auto rows = train.typical_rows(category);
  return fit_naive_bayes(rows, train.category(category));
}

GaussianNB fit_naive_bayes(std::span<const std::span<const double>> rows, CategoryLabel category) {
  if (rows.size() < 2)
    throw TrainingError("category '" + category.name + "' has " + std::to_string(rows.size()) +
                        " typical samples; naive Bayes needs at least 2");
  const std::size_t m = common_width(rows);
  GaussianNB nb{std::move(category), Eigen::VectorXd(m), Eigen::VectorXd(m)};
  for (std::size_t a = 0; a < m; ++a) {
    const auto col = column(rows, a);
    nb.mean(static_cast<Eigen::Index>(a)) = stats::mean(col);
    nb.variance(static_cast<Eigen::Index>(a)) = stats::floored_variance(col);
  }
  return nb;
}

std::vector<double> normalized_relevance(std::span<const double> weights) {
  if (weights.empty()) return {};
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("relevance weights must be positive and finite");
  const auto [lo, hi] = std::minmax_element(weights.begin(), weights.end());
  if (*lo == *hi) return std::vector<double>(weights.size(), 1.0);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double scale = static_cast<double>(weights.size()) / total;
  std::vector<double> out(weights.size());
  std::transform(weights.begin(), weights.end(), out.begin(), [scale](double w) { return w * scale; });
  return out;
}

Eigen::VectorXd weighted_log_densities(const Eigen::VectorXd& mean, const Eigen::VectorXd& variance,
                                       std::span<const double> x, std::span<const double> relevance) {
  const auto m = static_cast<std::size_t>(mean.size());
  check_dimension(m, x.size());
  if (!relevance.empty()) check_dimension(m, relevance.size());
  const auto w = normalized_relevance(relevance);
  Eigen::VectorXd terms(mean.size());
  for (std::size_t i = 0; i < m; ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    double t = stats::gaussian_log_density(x[i], mean(e), variance(e));
    if (!w.empty()) t *= w[i];
    terms(e) = t;
  }
  return terms;
}

TypicalityScore nb_log_likelihood(const GaussianNB& model, std::span<const double> x,
                                  std::span<const double> relevance) {
  const Eigen::VectorXd terms = weighted_log_densities(model.mean, model.variance, x, relevance);
  return {terms.sum(), relevance.empty() ? ModelKind::naive_bayes : ModelKind::naive_bayes_relevance};
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) return kBandwidthFloor;
  const double sd = std::sqrt(stats::sample_variance(values));
  const double h = 1.06 * sd * std::pow(static_cast<double>(values.size()), -0.2);
  return std::max(h, kBandwidthFloor);
}

KDEModel fit_kde(const Dataset& train, std::size_t category, const KdeOptions& options) {
  const auto rows = train.typical_rows(category);
  return fit_kde(rows, train.category(category), options);
}

KDEModel fit_kde(std::span<const std::span<const double>> rows, CategoryLabel category, const KdeOptions& options) {
  if (rows.empty()) throw TrainingError("category '" + category.name + "' has no typical samples for KDE");
  if (options.rule == BandwidthRule::fixed && !(options.fixed_bandwidth > 0.0))
    throw TrainingError("fixed KDE bandwidth must be positive");
  const std::size_t m = common_width(rows);
  const auto n = static_cast<Eigen::Index>(rows.size());
  KDEModel kde{std::move(category), Eigen::MatrixXd(n, static_cast<Eigen::Index>(m)),
               Eigen::VectorXd(static_cast<Eigen::Index>(m))};
  for (Eigen::Index j = 0; j < n; ++j)
    kde.points.row(j) = Eigen::Map<const Eigen::RowVectorXd>(rows[static_cast<std::size_t>(j)].data(),
                                                             static_cast<Eigen::Index>(m));

  if (options.rule == BandwidthRule::fixed) {
    kde.bandwidth.setConstant(options.fixed_bandwidth);
  } else if (options.scalar) {
    double mean_var = 0.0;
    if (rows.size() >= 2) {
      for (std::size_t a = 0; a < m; ++a) mean_var += stats::sample_variance(column(rows, a));
      mean_var /= static_cast<double>(m);
    }
    const double h = 1.06 * std::sqrt(mean_var) * std::pow(static_cast<double>(rows.size()), -0.2);
    kde.bandwidth.setConstant(std::max(h, kBandwidthFloor));
  } else {
    for (std::size_t a = 0; a < m; ++a)
      kde.bandwidth(static_cast<Eigen::Index>(a)) = silverman_bandwidth(column(rows, a));
  }
  return kde;
}

TypicalityScore kde_log_likelihood(const KDEModel& model, std::span<const double> x) {
  const auto m = model.points.cols();
  check_dimension(static_cast<std::size_t>(m), x.size());
  const Eigen::Map<const Eigen::RowVectorXd> q(x.data(), m);
  const Eigen::ArrayXd inv_h = model.bandwidth.array().inverse();
  const double log_norm = -static_cast<double>(m) * 0.5 * stats::kLogTwoPi + inv_h.log().sum();

  std::vector<double> terms(static_cast<std::size_t>(model.points.rows()));
  for (Eigen::Index j = 0; j < model.points.rows(); ++j) {
    const Eigen::ArrayXd z = (q - model.points.row(j)).transpose().array() * inv_h;
    terms[static_cast<std::size_t>(j)] = log_norm - 0.5 * z.square().sum();
  }
  return {stats::log_sum_exp(terms) - std::log(static_cast<double>(terms.size())), ModelKind::kde};
}

void to_json(nlohmann::json& j, const CategoryLabel& c) { j = {{"index", c.index}, {"name", c.name}}; }

void from_json(const nlohmann::json& j, CategoryLabel& c) {
  c.index = j.at("index").get<std::size_t>();
  c.name = j.at("name").get<std::string>();
}

void to_json(nlohmann::json& j, const GaussianNB& m) {
  j = {{"category", m.category}, {"mean", json_io::from_vector(m.mean)}, {"variance", json_io::from_vector(m.variance)}};
}

void from_json(const nlohmann::json& j, GaussianNB& m) {
  m.category = j.at("category").get<CategoryLabel>();
  m.mean = json_io::to_vector(j.at("mean"));
  m.variance = json_io::to_vector(j.at("variance"));
  if (m.mean.size() != m.variance.size()) throw ModelFormatError("naive Bayes mean/variance length mismatch");
}

void to_json(nlohmann::json& j, const KDEModel& m) {
  j = {{"category", m.category},
       {"points", json_io::from_matrix(m.points)},
       {"bandwidth", json_io::from_vector(m.bandwidth)}};
}

void from_json(const nlohmann::json& j, KDEModel& m) {
  m.category = j.at("category").get<CategoryLabel>();
  m.points = json_io::to_matrix(j.at("points"));
  m.bandwidth = json_io::to_vector(j.at("bandwidth"));
  if (m.points.cols() != m.bandwidth.size() || m.points.rows() == 0)
    throw ModelFormatError("KDE points/bandwidth shape mismatch");
}

}  // namespace typicality
