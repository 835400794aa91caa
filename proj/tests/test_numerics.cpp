#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace parni;

namespace {

Matrix random_spd(Index d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix A(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) A(i, j) = standard_normal(rng);
  }
  return A * A.transpose() + Matrix(Matrix::Identity(d, d));
}

}  // namespace

TEST(SpdFactor, AgreesWithEliminationOracle) {
  const Matrix M = random_spd(6, 1);
  const SpdFactor f = spd_factor(M);
  EXPECT_NEAR(f.log_det(), oracle::gauss_log_det(M), 1e-10);
  const Vector b = Vector::LinSpaced(6, -1.0, 2.0);
  const Vector x = oracle::gauss_solve(M, b);
  EXPECT_LT((f.solve(b) - x).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(f.inverse_quad(b), b.dot(x), 1e-10);
  // L^{-T} applied to the identity has outer product M^{-1}
  Matrix T(6, 6);
  for (Index c = 0; c < 6; ++c) T.col(c) = f.inverse_transpose_apply(Matrix::Identity(6, 6).col(c));
  EXPECT_LT((T * T.transpose() - f.inverse()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((f.lower() * f.lower().transpose() - M).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SpdFactor, EmptyAndFailureCases) {
  const SpdFactor e = spd_factor(Matrix(0, 0));
  EXPECT_EQ(e.dim(), 0);
  EXPECT_EQ(e.log_det(), 0.0);
  EXPECT_EQ(e.inverse_quad(Vector(0)), 0.0);
  Matrix bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(spd_factor(bad), NotPositiveDefinite);
  EXPECT_THROW(spd_factor_jittered(bad), NotPositiveDefinite);
  Matrix semi(2, 2);
  semi << 1, 1, 1, 1;
  EXPECT_NO_THROW(spd_factor_jittered(semi));
}

class ExpansionByKind : public ::testing::TestWithParam<ModelKind> {};

TEST_P(ExpansionByKind, GradientAndHessianMatchFiniteDifferences) {
  const ModelKind kind = GetParam();
  const Index q = kind == ModelKind::cox_partial ? 0 : 1;
  const Dataset d = oracle::random_dataset(kind, 60, 5, q, 50 + static_cast<int>(kind), true);
  const std::optional<double> k = kind == ModelKind::weibull ? std::optional<double>(1.4) : std::nullopt;
  const GlmModel m(d, k);
  PriorConfig pr;
  pr.g = 2.0;
  const ModelIndicator g = ModelIndicator::from_bits({1, 0, 1, 1, 0});
  const Matrix J = design_matrix(m, g);
  Rng rng(9);
  Vector theta(J.cols());
  for (Index i = 0; i < theta.size(); ++i) theta[i] = 0.3 * standard_normal(rng);
  const PosteriorExpansion e = expand_posterior(m, J, g, pr, theta);
  auto f = [&](const Vector& t) { return neg_log_posterior(m, J, g, pr, t); };
  EXPECT_NEAR(e.neg_log_post(), f(theta), 1e-10);
  const Vector grad = oracle::fd_gradient(f, theta, 1e-6);
  EXPECT_LT((e.grad - grad).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + grad.cwiseAbs().maxCoeff()));
  auto gfun = [&](const Vector& t) { return expand_posterior(m, J, g, pr, t).grad; };
  const Matrix H = oracle::fd_jacobian(gfun, theta, 1e-6);
  EXPECT_LT((e.hessian - H).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + H.cwiseAbs().maxCoeff()));
}

TEST_P(ExpansionByKind, NewtonDirectAndIrlsFormsAgree) {
  const ModelKind kind = GetParam();
  const Index q = kind == ModelKind::cox_partial ? 0 : 1;
  Rng rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset d = oracle::random_dataset(kind, 40, 6, q, 1000 + static_cast<std::uint64_t>(rep), rep % 2 == 0);
    const std::optional<double> k =
        kind == ModelKind::weibull ? std::optional<double>(0.5 + uniform01(rng) * 2.0) : std::nullopt;
    const GlmModel m(d, k);
    PriorConfig pr;
    pr.g = 0.5 + 3.0 * uniform01(rng);
    ModelIndicator g = oracle::random_model(6, rng);
    if (g.size() == 0) g.set(0, true);
    Vector theta(coefficient_count(q, g));
    for (Index i = 0; i < theta.size(); ++i) theta[i] = 0.5 * standard_normal(rng);
    const Vector a = newton_one_step(m, g, pr, theta, NewtonForm::direct);
    const Vector b = newton_one_step(m, g, pr, theta, NewtonForm::irls);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + a.cwiseAbs().maxCoeff())) << "rep " << rep;
  }
}

TEST_P(ExpansionByKind, MapEstimateReachesStationaryPoint) {
  const ModelKind kind = GetParam();
  const Index q = kind == ModelKind::cox_partial ? 0 : 1;
  const Dataset d = oracle::random_dataset(kind, 80, 4, q, 70 + static_cast<int>(kind));
  const std::optional<double> k = kind == ModelKind::weibull ? std::optional<double>(1.2) : std::nullopt;
  const GlmModel m(d, k);
  PriorConfig pr;
  const ModelIndicator g = ModelIndicator::from_bits({1, 1, 0, 1});
  const Matrix J = design_matrix(m, g);
  const Vector far = Vector::Constant(J.cols(), 4.0);
  const MapResult r = map_estimate(m, J, g, pr, far);
  ASSERT_TRUE(r.converged);
  EXPECT_LT(r.grad_norm, 1e-8);
  const PosteriorExpansion e = expand_posterior(m, J, g, pr, r.theta);
  EXPECT_LT(e.grad.cwiseAbs().maxCoeff(), 1e-8);
  // the mode is a minimum of the negated log-posterior in every coordinate direction
  for (Index i = 0; i < r.theta.size(); ++i) {
    Vector t = r.theta;
    t[i] += 1e-3;
    EXPECT_GT(neg_log_posterior(m, J, g, pr, t), e.neg_log_post());
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, ExpansionByKind,
                         ::testing::Values(ModelKind::logistic, ModelKind::cox_partial, ModelKind::weibull));

TEST(MapEstimate, GaussianModeIsClosedFormPosteriorMean) {
  Rng rng(3);
  Matrix X(30, 3);
  for (Index i = 0; i < 30; ++i) {
    for (Index j = 0; j < 3; ++j) X(i, j) = standard_normal(rng);
  }
  Vector y(30);
  for (Index i = 0; i < 30; ++i) y[i] = X(i, 0) - 0.5 * X(i, 2) + standard_normal(rng);
  const oracle::GaussianSurrogate m(X, Matrix::Ones(30, 1), y);
  PriorConfig pr;
  pr.g = 3.0;
  const ModelIndicator g = ModelIndicator::from_bits({1, 1, 1});
  const Matrix J = design_matrix(m, g);
  Matrix A = J.transpose() * J;
  A.diagonal() += prior_precision(1, g, pr);
  const Vector mean = oracle::gauss_solve(A, J.transpose() * y);
  const MapResult r = map_estimate(m, J, g, pr, Vector::Zero(4));
  EXPECT_LE(r.iterations, 2);
  EXPECT_LT((r.theta - mean).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(IrlsUpdate, EmptyModelGivesEmptyCoefficients) {
  const Dataset d = oracle::random_dataset(ModelKind::logistic, 10, 2, 0, 5);
  const GlmModel m(d);
  const Vector t = newton_one_step(m, ModelIndicator(2), PriorConfig{}, Vector(0), NewtonForm::irls);
  EXPECT_EQ(t.size(), 0);
}
