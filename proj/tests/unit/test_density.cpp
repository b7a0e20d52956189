#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "typicality/density.hpp"
#include "typicality/error.hpp"
#include "typicality/stats.hpp"

using namespace typicality;

namespace {
std::vector<double> vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }
}  // namespace

TEST(NaiveBayes, TwoPointFitAndFloor) {
  const Dataset d = fixtures::make_dataset({{0.0, 0.0, 7.0}, {2.0, 2.0, 7.0}}, {0, 0}, 1);
  const GaussianNB nb = fit_naive_bayes(d, 0);
  EXPECT_EQ(vec(nb.mean), (std::vector<double>{1.0, 1.0, 7.0}));
  EXPECT_EQ(nb.variance(0), 2.0);
  EXPECT_EQ(nb.variance(1), 2.0);
  EXPECT_EQ(nb.variance(2), kVarianceFloor);
  EXPECT_EQ(nb.category.name, "c0");
}

TEST(NaiveBayes, FitIgnoresSampleOrderAndNeedsTwoSamples) {
  std::mt19937_64 rng(41);
  auto rows = fixtures::gaussian_rows(rng, 30, 4);
  const auto a = fit_naive_bayes(fixtures::make_dataset(rows, std::vector<std::size_t>(30, 0), 1), 0);
  std::reverse(rows.begin(), rows.end());
  const auto b = fit_naive_bayes(fixtures::make_dataset(rows, std::vector<std::size_t>(30, 0), 1), 0);
  EXPECT_LT((a.mean - b.mean).norm(), 1e-14);
  EXPECT_LT((a.variance - b.variance).norm(), 1e-14);
  const Dataset one = fixtures::make_dataset({{1.0}, {2.0}, {3.0}}, {0, 0, 1}, 2);
  try {
    fit_naive_bayes(one, 1);
    FAIL() << "expected a training error";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("c1"), std::string::npos);
  }
}

TEST(NaiveBayes, PeakValueWithUnitVariance) {
  GaussianNB nb;
  nb.mean = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  nb.variance = Eigen::VectorXd::Ones(5);
  EXPECT_NEAR(nb_log_likelihood(nb, vec(nb.mean)).value, -2.5 * std::log(2.0 * M_PI), 1e-12);
}

TEST(NaiveBayes, MatchesPerDimensionClosedForm) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.1, 3.0);
  for (int t = 0; t < 10; ++t) {
    GaussianNB nb;
    nb.mean.resize(6);
    nb.variance.resize(6);
    std::vector<double> x(6), w(6);
    for (int i = 0; i < 6; ++i) {
      nb.mean(i) = nd(rng);
      nb.variance(i) = pos(rng);
      x[static_cast<std::size_t>(i)] = 2.0 * nd(rng);
      w[static_cast<std::size_t>(i)] = pos(rng);
    }
    EXPECT_NEAR(nb_log_likelihood(nb, x).value, oracle::naive_bayes_log_likelihood(vec(nb.mean), vec(nb.variance), x),
                1e-10);
    double sum_w = 0.0;
    for (double v : w) sum_w += v;
    std::vector<double> wn(6);
    for (int i = 0; i < 6; ++i) wn[static_cast<std::size_t>(i)] = 6.0 * w[static_cast<std::size_t>(i)] / sum_w;
    const auto weighted = nb_log_likelihood(nb, x, w);
    EXPECT_EQ(weighted.kind, ModelKind::naive_bayes_relevance);
    EXPECT_NEAR(weighted.value, oracle::naive_bayes_log_likelihood(vec(nb.mean), vec(nb.variance), x, wn), 1e-10);
  }
}

TEST(NaiveBayes, UniformRelevanceEqualsUnweightedExactly) {
  std::mt19937_64 rng(43);
  auto rows = fixtures::gaussian_rows(rng, 20, 7);
  const auto nb = fit_naive_bayes(fixtures::make_dataset(rows, std::vector<std::size_t>(20, 0), 1), 0);
  for (double level : {1.0, 3.7, 1e3}) {
    const std::vector<double> uniform(7, level);
    for (const auto& x : fixtures::gaussian_rows(rng, 25, 7, 2.0))
      EXPECT_EQ(nb_log_likelihood(nb, x, uniform).value, nb_log_likelihood(nb, x).value);
  }
  EXPECT_EQ(normalized_relevance(std::vector<double>(4, 0.3)), std::vector<double>(4, 1.0));
}

TEST(NaiveBayes, MaximizedAtTheMeanAndChecksDimension) {
  GaussianNB nb;
  nb.mean = Eigen::Vector3d(0.5, -1.0, 2.0);
  nb.variance = Eigen::Vector3d(0.3, 1.0, 4.0);
  const double peak = nb_log_likelihood(nb, vec(nb.mean)).value;
  for (int i = 0; i < 3; ++i)
    for (double delta : {-0.5, 0.01, 2.0}) {
      auto x = vec(nb.mean);
      x[static_cast<std::size_t>(i)] += delta;
      EXPECT_LT(nb_log_likelihood(nb, x).value, peak);
    }
  EXPECT_THROW(nb_log_likelihood(nb, std::vector<double>{1.0, 2.0}), DimensionError);
  EXPECT_THROW(nb_log_likelihood(nb, vec(nb.mean), std::vector<double>{1.0}), DimensionError);
}

TEST(Kde, SinglePointUsesFloorBandwidth) {
  const auto m = fit_kde(fixtures::make_dataset({{1.0, 2.0}}, {0}, 1), 0);
  EXPECT_EQ(m.points.rows(), 1);
  EXPECT_EQ(m.points(0, 1), 2.0);
  EXPECT_EQ(vec(m.bandwidth), (std::vector<double>{kBandwidthFloor, kBandwidthFloor}));
  EXPECT_THROW(fit_kde(fixtures::make_dataset({{1.0}, {2.0}}, {0, 0}, 2), 1), TrainingError);
}

TEST(Kde, FixedAndScalarBandwidths) {
  std::mt19937_64 rng(44);
  const Dataset d = fixtures::make_dataset(fixtures::gaussian_rows(rng, 20, 3), std::vector<std::size_t>(20, 0), 1);
  KdeOptions fixed;
  fixed.rule = BandwidthRule::fixed;
  fixed.fixed_bandwidth = 0.5;
  EXPECT_EQ(vec(fit_kde(d, 0, fixed).bandwidth), std::vector<double>(3, 0.5));
  KdeOptions scalar;
  scalar.scalar = true;
  const auto s = fit_kde(d, 0, scalar);
  EXPECT_EQ(s.bandwidth(0), s.bandwidth(1));
  EXPECT_EQ(s.bandwidth(1), s.bandwidth(2));
  fixed.fixed_bandwidth = 0.0;
  EXPECT_THROW(fit_kde(d, 0, fixed), TrainingError);
}

TEST(Kde, SilvermanMatchesFormula) {
  std::mt19937_64 rng(45);
  std::normal_distribution<double> nd(3.0, 2.0);
  std::vector<double> values(20);
  for (double& v : values) v = nd(rng);
  EXPECT_NEAR(silverman_bandwidth(values), oracle::silverman(values), 1e-14);
  fixtures::Rows rows;
  for (double v : values) rows.push_back({v});
  EXPECT_NEAR(fit_kde(fixtures::make_dataset(rows, std::vector<std::size_t>(20, 0), 1), 0).bandwidth(0),
              oracle::silverman(values), 1e-14);
  EXPECT_EQ(silverman_bandwidth(std::vector<double>{4.0, 4.0, 4.0}), kBandwidthFloor);
}

TEST(Kde, KernelPeakForOnePoint) {
  KDEModel m;
  m.points = Eigen::MatrixXd::Constant(1, 1, 0.25);
  m.bandwidth = Eigen::VectorXd::Ones(1);
  EXPECT_NEAR(kde_log_likelihood(m, std::vector<double>{0.25}).value, -0.9189385332046727, 1e-12);
}

TEST(Kde, MatchesDirectSummation) {
  std::mt19937_64 rng(46);
  for (int t = 0; t < 10; ++t) {
    const auto pts = fixtures::gaussian_rows(rng, 15, 4);
    const auto m = fit_kde(fixtures::make_dataset(pts, std::vector<std::size_t>(15, 0), 1), 0);
    for (const auto& x : fixtures::gaussian_rows(rng, 10, 4, 1.2))
      EXPECT_NEAR(kde_log_likelihood(m, x).value, oracle::kde_log_density(pts, vec(m.bandwidth), x), 1e-10);
  }
}

TEST(Kde, OneDimensionalDensityIntegratesToOne) {
  std::mt19937_64 rng(47);
  const auto pts = fixtures::gaussian_rows(rng, 25, 1);
  const auto m = fit_kde(fixtures::make_dataset(pts, std::vector<std::size_t>(25, 0), 1), 0);
  const double area = oracle::trapezoid(
      [&](double x) { return std::exp(kde_log_likelihood(m, std::vector<double>{x}).value); }, -12.0, 12.0, 20000);
  EXPECT_NEAR(area, 1.0, 1e-2);
}

TEST(Kde, MirrorSymmetryAndFiniteFarAway) {
  KDEModel m;
  m.points.resize(2, 1);
  m.points << -1.0, 3.0;
  m.bandwidth = Eigen::VectorXd::Constant(1, 0.7);
  for (double off : {0.1, 1.3, 4.0})
    EXPECT_NEAR(kde_log_likelihood(m, std::vector<double>{1.0 + off}).value,
                kde_log_likelihood(m, std::vector<double>{1.0 - off}).value, 1e-12);
  const double far = kde_log_likelihood(m, std::vector<double>{1e4}).value;
  EXPECT_TRUE(std::isfinite(far));
  EXPECT_THROW(kde_log_likelihood(m, std::vector<double>{1.0, 2.0}), DimensionError);
}
