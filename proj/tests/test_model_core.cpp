#include "oracles.hpp"

#include <gtest/gtest.h>

#include <unordered_set>

using namespace parni;

TEST(ModelIndicator, SetFlipAndIncludedStaySorted) {
  ModelIndicator m(6);
  m.set(4, true);
  m.set(1, true);
  m.flip(3);
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m.included(), (std::vector<Index>{1, 3, 4}));
  EXPECT_EQ(m.rank_of(3), 1u);
  m.flip(3);
  EXPECT_EQ(m.included(), (std::vector<Index>{1, 4}));
  EXPECT_EQ(m.hamming(ModelIndicator(6)), 2u);
  EXPECT_EQ(ModelIndicator::from_bits({0, 1, 0, 0, 1, 0}), m);
  EXPECT_EQ(m.flipped(0).size(), 3u);
  EXPECT_THROW(ModelIndicator(0), ConfigError);
  EXPECT_THROW(m.set(6, true), ConfigError);
}

TEST(ModelIndicator, HashDistinguishesModels) {
  std::unordered_set<std::size_t> seen;
  for (std::uint64_t idx = 0; idx < 256; ++idx) seen.insert(model_from_index(idx, 8).hash());
  EXPECT_GT(seen.size(), 250u);
}

TEST(ModelKind, ParsesNamesAndAliases) {
  EXPECT_EQ(parse_model_kind("logistic"), ModelKind::logistic);
  EXPECT_EQ(parse_model_kind("cox"), ModelKind::cox_partial);
  EXPECT_EQ(parse_model_kind("weibull"), ModelKind::weibull);
  EXPECT_THROW(parse_model_kind("probit"), ConfigError);
}

TEST(Standardize, UnitSampleVarianceAndConstantColumnRejected) {
  Matrix X(4, 2);
  X << 1, 5, 2, 6, 3, 8, 6, 9;
  const ColumnScaling s = standardize_columns(X);
  EXPECT_TRUE(s.applied);
  for (Index j = 0; j < 2; ++j) {
    EXPECT_NEAR(X.col(j).mean(), 0.0, 1e-14);
    EXPECT_NEAR(X.col(j).squaredNorm() / 3.0, 1.0, 1e-14);
  }
  EXPECT_DOUBLE_EQ(s.center[0], 3.0);
  Matrix C(3, 2);
  C << 1, 2, 1, 3, 1, 4;
  try {
    standardize_columns(C, {"flat", "ok"});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("flat"), std::string::npos);
  }
}

TEST(Dataset, ValidatesInputs) {
  Matrix X = Matrix::Random(3, 2);
  EXPECT_THROW(Dataset::logistic(X, Matrix(), Vector::Constant(3, 0.5)), DataError);
  EXPECT_THROW(Dataset::logistic(X, Matrix(), Vector::Zero(2)), DataError);
  Vector t(3), d(3);
  t << 1.0, 0.0, 2.0;
  d << 1, 0, 1;
  try {
    Dataset::survival(ModelKind::cox_partial, X, Matrix(), t, d);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
  t[1] = 3.0;
  d[1] = 2.0;
  EXPECT_THROW(Dataset::survival(ModelKind::weibull, X, Matrix(), t, d), DataError);
  d[1] = 0.0;
  const Dataset ok = Dataset::survival(ModelKind::cox_partial, X, Matrix(), t, d);
  EXPECT_EQ(ok.n(), 3);
  EXPECT_EQ(ok.q(), 0);
  EXPECT_TRUE(ok.risk_sets() != nullptr);
}

TEST(RiskSets, GroupsTiesInAscendingOrder) {
  Vector t(5), d(5);
  t << 3.0, 1.0, 3.0, 2.0, 1.0;
  d << 1, 1, 0, 1, 0;
  const RiskSets rs = RiskSets::build(t, d);
  ASSERT_EQ(rs.groups(), 3u);
  EXPECT_EQ(rs.group_begin, (std::vector<Index>{0, 2, 3, 5}));
  EXPECT_EQ(rs.events, (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(rs.group_of[0], 2);
  EXPECT_EQ(rs.group_of[4], 0);
}

TEST(ModelPrior, FixedInclusionClosedForm) {
  PriorConfig pr;
  pr.model_prior = FixedInclusion{0.2};
  EXPECT_NEAR(log_model_prior(3, 10, pr), 3 * std::log(0.2) + 7 * std::log(0.8), 1e-14);
}

TEST(ModelPrior, BetaBinomialHandValues) {
  PriorConfig pr;
  pr.model_prior = BetaBinomial{1.0, 1.0};
  // uniform on the size, spread evenly within a size: 1 / ((p + 1) C(p, k))
  EXPECT_NEAR(std::exp(log_model_prior(1, 2, pr)), 1.0 / 6.0, 1e-14);
  EXPECT_NEAR(std::exp(log_model_prior(0, 4, pr)), 1.0 / 5.0, 1e-14);
}

TEST(ModelPrior, BetaBinomialNormalisesOverAllModels) {
  for (double a : {0.5, 1.0, 3.0}) {
    PriorConfig pr;
    pr.model_prior = BetaBinomial{a, 2.5};
    for (std::size_t p = 1; p <= 12; ++p) {
      double total = 0.0;
      for (std::uint64_t idx = 0; idx < (1ULL << p); ++idx) {
        total += std::exp(log_model_prior(model_from_index(idx, p), pr));
      }
      EXPECT_NEAR(total, 1.0, 1e-10) << "p=" << p << " a=" << a;
    }
  }
}

TEST(PriorConfig, RejectsInvalidValues) {
  PriorConfig pr;
  pr.g = 0.0;
  EXPECT_THROW(pr.validate(), ConfigError);
  pr = PriorConfig{};
  pr.model_prior = FixedInclusion{1.0};
  EXPECT_THROW(pr.validate(), ConfigError);
  pr.model_prior = BetaBinomial{0.0, 1.0};
  EXPECT_THROW(pr.validate(), ConfigError);
}

TEST(CoefficientPrior, MatchesIndependentNormalDensities) {
  PriorConfig pr;
  pr.g = 2.5;
  pr.sigma_alpha_sq = 9.0;
  ModelIndicator m = ModelIndicator::from_bits({1, 0, 1});
  Vector theta(3);
  theta << 0.7, -1.2, 0.4;
  auto lnorm = [](double x, double var) { return -0.5 * std::log(2 * std::numbers::pi * var) - 0.5 * x * x / var; };
  const double expected = lnorm(0.7, 9.0) + lnorm(-1.2, 2.5) + lnorm(0.4, 2.5);
  EXPECT_NEAR(log_coeff_prior(theta, 1, m, pr), expected, 1e-13);
  EXPECT_NEAR(log_det_prior_cov(1, m, pr), std::log(9.0) + 2 * std::log(2.5), 1e-14);
  EXPECT_THROW(log_coeff_prior(Vector::Zero(2), 1, m, pr), DataError);
}

TEST(Likelihood, LogisticMatchesNaiveAndStaysFiniteAtExtremes) {
  const Dataset d = oracle::random_dataset(ModelKind::logistic, 40, 3, 0, 11);
  Rng rng(5);
  Vector eta(40);
  for (Index i = 0; i < 40; ++i) eta[i] = 3.0 * standard_normal(rng);
  EXPECT_NEAR(log_likelihood_eta(d, eta), oracle::logistic_naive(d.y(), eta), 1e-10);
  const Vector big = Vector::Constant(40, 800.0);
  const double ll = log_likelihood_eta(d, big);
  EXPECT_TRUE(std::isfinite(ll));
  const double zeros = static_cast<double>((d.y().array() == 0.0).count());
  EXPECT_NEAR(ll, -800.0 * zeros, 1e-9);
}

TEST(Likelihood, CoxMatchesNaiveBreslowWithTies) {
  const Dataset d = oracle::random_dataset(ModelKind::cox_partial, 50, 3, 0, 12, true);
  Rng rng(6);
  Vector eta(50);
  for (Index i = 0; i < 50; ++i) eta[i] = standard_normal(rng);
  EXPECT_NEAR(log_likelihood_eta(d, eta), oracle::cox_partial_naive(d.time(), d.event(), eta), 1e-10);
  // invariant to shifting eta
  EXPECT_NEAR(log_likelihood_eta(d, (eta.array() + 300.0).matrix()), log_likelihood_eta(d, eta), 1e-8);
}

TEST(Likelihood, WeibullMatchesHazardForm) {
  const Dataset d = oracle::random_dataset(ModelKind::weibull, 30, 2, 1, 13);
  Rng rng(7);
  Vector eta(30);
  for (Index i = 0; i < 30; ++i) eta[i] = 0.5 * standard_normal(rng);
  for (double k : {0.6, 1.0, 2.3}) {
    EXPECT_NEAR(log_likelihood_eta(d, eta, k), oracle::weibull_naive(d.time(), d.event(), eta, k), 1e-10);
  }
  EXPECT_THROW(log_likelihood_eta(d, eta), DataError);
  EXPECT_THROW(log_likelihood_eta(d, eta, -1.0), DataError);
}

namespace {

void check_derivatives(const Dataset& d, std::optional<double> k, std::uint64_t seed) {
  Rng rng(seed);
  Vector eta(d.n());
  for (Index i = 0; i < d.n(); ++i) eta[i] = 0.7 * standard_normal(rng);
  const GlmDerivatives der = eta_derivatives(d, eta, k);
  auto ll = [&](const Vector& e) { return log_likelihood_eta(d, e, k); };
  const Vector grad = oracle::fd_gradient(ll, eta, 1e-6);
  EXPECT_LT((der.y_tilde + grad).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + grad.cwiseAbs().maxCoeff()));
  auto score = [&](const Vector& e) { return Vector(-eta_derivatives(d, e, k).y_tilde); };
  const Matrix hess = oracle::fd_jacobian(score, eta, 1e-6);
  EXPECT_LT((der.W.dense() + hess).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + hess.cwiseAbs().maxCoeff()));
}

}  // namespace

TEST(Derivatives, MatchFiniteDifferencesForAllKinds) {
  check_derivatives(oracle::random_dataset(ModelKind::logistic, 25, 2, 0, 21), std::nullopt, 1);
  check_derivatives(oracle::random_dataset(ModelKind::cox_partial, 25, 2, 0, 22, true), std::nullopt, 2);
  check_derivatives(oracle::random_dataset(ModelKind::cox_partial, 25, 2, 0, 23, false), std::nullopt, 3);
  check_derivatives(oracle::random_dataset(ModelKind::weibull, 25, 2, 0, 24), 1.7, 4);
}

TEST(Curvature, StructuredProductsMatchDenseMatrix) {
  const Dataset d = oracle::random_dataset(ModelKind::cox_partial, 40, 4, 0, 31, true);
  Rng rng(8);
  Vector eta(40);
  for (Index i = 0; i < 40; ++i) eta[i] = standard_normal(rng);
  const GlmDerivatives der = eta_derivatives(d, eta);
  const Matrix W = der.W.dense();
  EXPECT_LT((W - W.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  const Matrix A = Matrix::Random(40, 3);
  const Matrix B = Matrix::Random(40, 5);
  const Vector v = Vector::Random(40);
  EXPECT_LT((der.W.apply(v) - W * v).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((der.W.cross(A, B) - A.transpose() * W * B).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((der.W.gram(A) - A.transpose() * W * A).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((der.W.column_quad(B) - (B.transpose() * W * B).diagonal()).cwiseAbs().maxCoeff(), 1e-12);
  // a common shift of eta leaves the partial likelihood unchanged, so W 1 = 0
  EXPECT_LT(der.W.apply(Vector::Ones(40)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ModelLikelihood, DesignMatrixAndCoefficientLikelihood) {
  const Dataset d = oracle::random_dataset(ModelKind::logistic, 20, 4, 1, 41);
  const GlmModel m(d);
  const ModelIndicator g = ModelIndicator::from_bits({0, 1, 0, 1});
  const Matrix J = design_matrix(m, g);
  ASSERT_EQ(J.cols(), 3);
  EXPECT_EQ(J.col(0), d.Z().col(0));
  EXPECT_EQ(J.col(1), d.X().col(1));
  EXPECT_EQ(J.col(2), d.X().col(3));
  Vector theta(3);
  theta << 0.1, 0.5, -0.3;
  EXPECT_NEAR(log_likelihood(d, g, theta), oracle::logistic_naive(d.y(), J * theta), 1e-10);
  EXPECT_THROW(log_likelihood(d, g, Vector::Zero(2)), DataError);
}
