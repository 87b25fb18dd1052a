#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "support.hpp"
#include "tvis/degrade.hpp"
#include "tvis/mld.hpp"

using namespace tvis;
using namespace tvis_test;

namespace {

SpectralFilter blur(std::size_t n, std::size_t m, double sigma) {
  BlurSpec spec;
  spec.sigma = sigma;
  spec.rows = n;
  spec.cols = m;
  return gaussian_blur_filter(spec);
}

Eigen::MatrixXd dense(DiffusionOperator& op, std::size_t n, std::size_t m) {
  const std::size_t d = n * m;
  Eigen::MatrixXd a(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    Image e(n, m);
    e[j] = 1.0;
    const Image col = op.apply(e);
    for (std::size_t i = 0; i < d; ++i) a(Eigen::Index(i), Eigen::Index(j)) = col[i];
  }
  return a;
}

DiffusionOperator frozen_operator(std::size_t n, std::size_t m, double lambda) {
  DiffusionOperator op(blur(n, m, 0.9), lambda);
  op.freeze(random_image(n, m, 11, 0.0, 10.0), 0.05);
  return op;
}

}  // namespace

TEST(DiffusionOperator, SymmetricPositiveDefinite) {
  DiffusionOperator op = frozen_operator(6, 5, 2.0);
  const Eigen::MatrixXd a = dense(op, 6, 5);
  EXPECT_LT((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(DiffusionOperator, DiagonalMatchesDenseDiagonal) {
  DiffusionOperator op = frozen_operator(6, 7, 1.5);
  const Eigen::MatrixXd a = dense(op, 6, 7);
  const Image d = op.diagonal();
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], a(Eigen::Index(i), Eigen::Index(i)), 1e-12);
}

TEST(DiffusionOperator, ConjugateGradientMatchesDenseSolve) {
  DiffusionOperator op = frozen_operator(6, 6, 3.0);
  const Eigen::MatrixXd a = dense(op, 6, 6);
  const Image rhs = random_image(6, 6, 12);
  Eigen::VectorXd b(36);
  for (std::size_t i = 0; i < 36; ++i) b(Eigen::Index(i)) = rhs[i];
  const Eigen::VectorXd expect = a.ldlt().solve(b);
  Image x(6, 6);
  const CgReport rep = conjugate_gradient(op, rhs, x, 1e-13, 500);
  EXPECT_TRUE(rep.converged);
  double err = 0.0;
  for (std::size_t i = 0; i < 36; ++i) err = std::max(err, std::abs(x[i] - expect(Eigen::Index(i))));
  EXPECT_LT(err, 1e-9 * expect.cwiseAbs().maxCoeff());
}

TEST(DiffusionOperator, ZeroRightHandSide) {
  DiffusionOperator op = frozen_operator(4, 4, 1.0);
  Image x = random_image(4, 4, 1);
  const CgReport rep = conjugate_gradient(op, Image(4, 4), x, 1e-10, 10);
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(norms(x).linf, 0.0);
}

TEST(MldRestore, VanishingWeightReturnsTheData) {
  const Image g = random_image(8, 8, 3, 0.0, 255.0);
  MldConfig cfg;
  cfg.lambda = 1e-9;
  const MldResult r = mld_restore(g, identity_filter(8, 8), cfg);
  EXPECT_LT(relative_l2_error(r.restored, g), 1e-6);
}

TEST(MldRestore, ReachesThePlugBackTolerance) {
  const Image f = shepp_logan(32, 32);
  const SpectralFilter h = blur(32, 32, 0.8);
  NoiseSpec noise;
  noise.sigma = 8.0;
  noise.seed = 5;
  const Image g = degrade(f, h, noise);
  MldConfig cfg;
  cfg.lambda = 1.0;
  cfg.epsilon_schedule = MldConfig::halving_schedule(1e-1, 1e-3);
  const MldResult r = mld_restore(g, h, cfg);
  ASSERT_FALSE(r.stages.empty());
  EXPECT_LT(r.stages.back().outer_iterations, cfg.outer_max_iters);
  EXPECT_LE(r.stages.back().residual, cfg.outer_tol);
  EXPECT_NEAR(mld_residual(r.restored, g, h, cfg.lambda, r.stages.back().epsilon), r.stages.back().residual,
              1e-12);
}

TEST(MldRestore, StageEnergiesDoNotIncrease) {
  const Image f = shepp_logan(32, 32);
  const SpectralFilter h = blur(32, 32, 1.0);
  NoiseSpec noise;
  noise.sigma = 6.0;
  noise.seed = 6;
  MldConfig cfg;
  cfg.lambda = 3.0;
  cfg.epsilon_schedule = MldConfig::halving_schedule(1.0, 1e-3);
  const MldResult r = mld_restore(degrade(f, h, noise), h, cfg);
  for (std::size_t k = 1; k < r.stages.size(); ++k) {
    EXPECT_LE(r.stages[k].smoothed_energy, r.stages[k - 1].smoothed_energy * (1 + 1e-6)) << "stage " << k;
    EXPECT_NEAR(r.stages[k].smoothed_energy, r.stages[k].data_term + r.stages[k].tv_term, 1e-9);
  }
}

TEST(MldConfig, HalvingSchedule) {
  const auto s = MldConfig::halving_schedule(1e-2, 1e-6);
  ASSERT_GE(s.size(), 2u);
  EXPECT_EQ(s.front(), 1e-2);
  EXPECT_EQ(s.back(), 1e-6);
  for (std::size_t i = 1; i + 1 < s.size(); ++i) EXPECT_DOUBLE_EQ(s[i], 0.5 * s[i - 1]);
  EXPECT_GT(s[s.size() - 2], 1e-6);
}

TEST(MldConfig, Validation) {
  MldConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.lambda = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.epsilon_schedule = {1e-2, 1e-2};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.epsilon_schedule.clear();
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.inner_max_iters = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_THROW(mld_restore(Image(4, 5), identity_filter(4, 4), MldConfig{}), ShapeError);
}

TEST(EstimateLambda, MatchesTheDefinition) {
  const Image f = random_image(9, 7, 21, 0.0, 255.0);
  const Field g = gradient(f);
  std::vector<double> mag;
  for (std::size_t i = 0; i < f.size(); ++i) mag.push_back(std::hypot(g.x(0)[i], g.y(0)[i]));
  double mean = 0.0;
  for (double v : mag) mean += v;
  mean /= double(mag.size());
  double var = 0.0;
  for (double v : mag) var += (v - mean) * (v - mean);
  var /= double(mag.size() - 1);
  const LambdaEstimate est = estimate_lambda(f, 25.0);
  EXPECT_NEAR(est.gradient_variance, var, 1e-9 * var);
  EXPECT_NEAR(est.beta, std::sqrt(0.5 * var), 1e-12 * est.beta);
  EXPECT_NEAR(est.lambda, 25.0 / std::sqrt(0.5 * var), 1e-12 * est.lambda);
}

TEST(EstimateLambda, Scaling) {
  const Image f = random_image(8, 8, 22, 0.0, 255.0);
  const double base = estimate_lambda(f, 4.0).lambda;
  EXPECT_NEAR(estimate_lambda(f, 8.0).lambda, 2.0 * base, 1e-12 * base);
  Image f2 = f;
  f2 *= 2.0;
  EXPECT_NEAR(estimate_lambda(f2, 4.0).lambda, 0.5 * base, 1e-12 * base);
  Image shifted = f;
  for (double& v : shifted.values()) v += 17.0;
  EXPECT_NEAR(estimate_lambda(shifted, 4.0).lambda, base, 1e-9 * base);
}

TEST(EstimateLambda, Errors) {
  EXPECT_THROW(estimate_lambda(random_image(4, 4, 1), 0.0), std::invalid_argument);
  EXPECT_THROW(estimate_lambda(Image(4, 4, 3.0), 1.0), std::invalid_argument);
}
