#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "typicality/error.hpp"
#include "typicality/ocsvm.hpp"

using namespace typicality;

namespace {

Eigen::MatrixXd to_eigen(const fixtures::Rows& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

std::vector<double> row_of(const Eigen::MatrixXd& m, Eigen::Index r) {
  const Eigen::VectorXd v = m.row(r).transpose();
  return {v.data(), v.data() + v.size()};
}

CategoryLabel label() { return CategoryLabel{0, "c0"}; }

OcsvmOptions options(double nu, std::optional<double> gamma = std::nullopt, double tol = 1e-4) {
  OcsvmOptions o;
  o.nu = nu;
  o.gamma = gamma;
  o.tol = tol;
  return o;
}

}  // namespace

TEST(Ocsvm, NuOneGivesUniformMultipliers) {
  std::mt19937_64 rng(71);
  const auto pts = to_eigen(fixtures::gaussian_rows(rng, 17, 3));
  OcsvmTrace trace;
  const auto m = train_ocsvm(pts, label(), options(1.0), &trace);
  ASSERT_EQ(m.alphas.size(), 17);
  for (Eigen::Index i = 0; i < m.alphas.size(); ++i) EXPECT_DOUBLE_EQ(m.alphas(i), 1.0 / 17.0);
  EXPECT_EQ(trace.iterations, 0);
}

TEST(Ocsvm, MatchesIndependentQuadraticProgram) {
  std::mt19937_64 rng(72);
  for (double nu : {0.2, 0.5}) {
    const auto rows = fixtures::gaussian_rows(rng, 12, 2);
    const double gamma = 0.5;
    OcsvmTrace trace;
    train_ocsvm(to_eigen(rows), label(), options(nu, gamma, 1e-10), &trace);
    const auto gram = oracle::rbf_gram(rows, gamma);
    const auto qp = oracle::box_simplex_qp(gram, 1.0 / (nu * 12.0), 200000);
    EXPECT_NEAR(trace.objective.back(), qp.objective, 1e-4);
    for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(trace.alphas(static_cast<Eigen::Index>(i)), qp.alphas[i], 1e-4);
  }
}

TEST(Ocsvm, FreeSupportVectorsSitOnTheBoundary) {
  std::mt19937_64 rng(73);
  const auto pts = to_eigen(fixtures::gaussian_rows(rng, 80, 3));
  OcsvmTrace trace;
  const double tol = 1e-6;
  const auto m = train_ocsvm(pts, label(), options(0.2, std::nullopt, tol), &trace);
  const double upper = 1.0 / (0.2 * 80.0);
  int free = 0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const double a = trace.alphas(i);
    const double f = ocsvm_decision_value(m, row_of(pts, i)).value;
    if (a > kAlphaPruneThreshold && a < upper) {
      ++free;
      EXPECT_LE(std::abs(f), tol);
    } else if (a == 0.0) {
      EXPECT_GE(f, -tol);
    } else {
      EXPECT_LE(f, tol);
    }
  }
  EXPECT_GT(free, 0);
  EXPECT_LE(trace.kkt_violation, tol);
}

TEST(Ocsvm, MultipliersFormAFeasiblePoint) {
  std::mt19937_64 rng(74);
  const auto pts = to_eigen(fixtures::gaussian_rows(rng, 50, 4));
  OcsvmTrace trace;
  const auto m = train_ocsvm(pts, label(), options(0.1), &trace);
  EXPECT_NEAR(trace.alphas.sum(), 1.0, 1e-12);
  EXPECT_GE(trace.alphas.minCoeff(), 0.0);
  EXPECT_LE(trace.alphas.maxCoeff(), 1.0 / (0.1 * 50.0));
  EXPECT_GE(m.alphas.minCoeff(), kAlphaPruneThreshold);
  EXPECT_LE(m.alphas.size(), pts.rows());
  EXPECT_EQ(m.training_size, 50u);
}

TEST(Ocsvm, ObjectiveNeverIncreases) {
  std::mt19937_64 rng(75);
  OcsvmTrace trace;
  train_ocsvm(to_eigen(fixtures::gaussian_rows(rng, 60, 3)), label(), options(0.1), &trace);
  ASSERT_GT(trace.objective.size(), 1u);
  for (std::size_t i = 1; i < trace.objective.size(); ++i)
    EXPECT_LE(trace.objective[i], trace.objective[i - 1] + 1e-15);
}

TEST(Ocsvm, FarPointScoresMinusRho) {
  std::mt19937_64 rng(76);
  const auto m = train_ocsvm(to_eigen(fixtures::gaussian_rows(rng, 30, 3)), label(), options(0.1));
  EXPECT_DOUBLE_EQ(ocsvm_decision_value(m, std::vector<double>{1e3, 1e3, 1e3}).value, -m.rho);
  EXPECT_EQ(ocsvm_decision_value(m, std::vector<double>{0.0, 0.0, 0.0}).kind, ModelKind::ocsvm);
  EXPECT_THROW(ocsvm_decision_value(m, std::vector<double>{0.0}), DimensionError);
}

TEST(Ocsvm, DecisionValueMatchesKernelExpansion) {
  std::mt19937_64 rng(77);
  const auto m = train_ocsvm(to_eigen(fixtures::gaussian_rows(rng, 40, 5)), label(), options(0.3));
  for (const auto& x : fixtures::gaussian_rows(rng, 20, 5, 1.5)) {
    double f = -m.rho;
    for (Eigen::Index s = 0; s < m.support_vectors.rows(); ++s) {
      const auto sv = row_of(m.support_vectors, s);
      double d2 = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) d2 += (sv[a] - x[a]) * (sv[a] - x[a]);
      f += m.alphas(s) * std::exp(-m.gamma * d2);
    }
    EXPECT_NEAR(ocsvm_decision_value(m, x).value, f, 1e-10);
  }
}

TEST(Ocsvm, RotationInvariant) {
  std::mt19937_64 rng(78);
  const auto pts = to_eigen(fixtures::gaussian_rows(rng, 40, 4));
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd g(4, 4);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  const auto a = train_ocsvm(pts, label(), options(0.2, std::nullopt, 1e-8));
  const auto b = train_ocsvm(pts * q, label(), options(0.2, std::nullopt, 1e-8));
  EXPECT_NEAR(a.gamma, b.gamma, 1e-12);
  for (const auto& x : fixtures::gaussian_rows(rng, 10, 4)) {
    const Eigen::VectorXd xr = q.transpose() * Eigen::Map<const Eigen::VectorXd>(x.data(), 4);
    EXPECT_NEAR(ocsvm_decision_value(a, x).value, ocsvm_decision_value(b, {xr.data(), 4}).value, 1e-6);
  }
}

TEST(Ocsvm, NuBoundsOutliersAndSupportVectors) {
  std::mt19937_64 rng(79);
  const auto pts = to_eigen(fixtures::gaussian_rows(rng, 200, 4));
  for (double nu : {0.05, 0.1, 0.3}) {
    OcsvmTrace trace;
    const auto m = train_ocsvm(pts, label(), options(nu), &trace);
    int outliers = 0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double f = ocsvm_decision_value(m, row_of(pts, i)).value;
      if (f < 0.0) ++outliers;
      // Only multipliers at the box bound may sit outside.
      if (trace.alphas(i) < 1.0 / (nu * 200.0)) {
        EXPECT_GE(f, 0.0);
      }
    }
    EXPECT_LE(outliers / 200.0, nu + 1e-12) << "nu " << nu;
    EXPECT_GE(static_cast<double>(m.alphas.size()) / 200.0, nu - 1e-12) << "nu " << nu;
  }
}

TEST(Ocsvm, DeterministicAndScaleGamma) {
  std::mt19937_64 rng(80);
  const auto pts = to_eigen(fixtures::gaussian_rows(rng, 30, 3, 2.0));
  const auto a = train_ocsvm(pts, label(), options(0.1));
  const auto b = train_ocsvm(pts, label(), options(0.1));
  EXPECT_EQ(a.rho, b.rho);
  EXPECT_TRUE(a.alphas == b.alphas);
  const Eigen::RowVectorXd mu = pts.colwise().mean();
  EXPECT_NEAR(a.gamma, 30.0 / (pts.rowwise() - mu).squaredNorm(), 1e-12);
  EXPECT_EQ(scale_gamma(Eigen::MatrixXd::Ones(4, 2)), 1.0);
}

TEST(Ocsvm, ReportsNonConvergenceAndBadOptions) {
  std::mt19937_64 rng(81);
  const auto pts = to_eigen(fixtures::gaussian_rows(rng, 40, 3));
  OcsvmOptions o = options(0.1, std::nullopt, 1e-12);
  o.max_iter = 1;
  EXPECT_THROW(train_ocsvm(pts, label(), o), ConvergenceError);
  EXPECT_THROW(train_ocsvm(pts, label(), options(0.0)), TrainingError);
  EXPECT_THROW(train_ocsvm(pts, label(), options(1.5)), TrainingError);
  EXPECT_THROW(train_ocsvm(pts, label(), options(0.1, -1.0)), TrainingError);
  EXPECT_THROW(train_ocsvm(pts.topRows(1), label(), options(0.1)), TrainingError);
}
