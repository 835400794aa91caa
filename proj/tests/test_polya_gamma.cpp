#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace parni;

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

template <class F>
Moments sample_moments(int n, F&& draw) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    s += x;
    s2 += x * x;
  }
  const double m = s / n;
  return {m, std::sqrt((s2 / n - m * m) / n)};
}

double laplace_pg1(double z, double t) {
  return std::cosh(0.5 * z) / std::cosh(std::sqrt(0.25 * z * z + 0.5 * t));
}

}  // namespace

TEST(PolyaGamma, MeanMatchesClosedForm) {
  Rng rng(2024);
  for (double z : {0.0, 1.0, 2.0, 4.0}) {
    const Moments m = sample_moments(100000, [&] { return sample_pg1(z, rng).value; });
    const double expected = z == 0.0 ? 0.25 : std::tanh(0.5 * z) / (2.0 * z);
    EXPECT_NEAR(m.mean, expected, 4.0 * m.se) << "z=" << z;
    EXPECT_NEAR(pg1_mean(z), expected, 1e-15);
  }
}

TEST(PolyaGamma, LaplaceTransformMatches) {
  Rng rng(77);
  for (double z : {0.0, 1.5, 3.0}) {
    for (double t : {1.0, 4.0}) {
      const Moments m = sample_moments(50000, [&] { return std::exp(-t * sample_pg1(z, rng).value); });
      EXPECT_NEAR(m.mean, laplace_pg1(z, t), 4.0 * m.se) << "z=" << z << " t=" << t;
    }
  }
}

TEST(PolyaGamma, VarianceMatchesClosedForm) {
  // Var PG(1, z) = (sinh z - z) / (4 z^3 cosh^2(z/2)); 1/24 at z = 0.
  Rng rng(31);
  for (double z : {0.0, 2.0}) {
    const int n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_pg1(z, rng).value;
    double m = 0.0;
    for (double x : xs) m += x;
    m /= n;
    std::vector<double> sq(n);
    for (int i = 0; i < n; ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
    const Moments v = sample_moments(n, [&, i = 0]() mutable { return sq[i++]; });
    const double expected =
        z == 0.0 ? 1.0 / 24.0 : (std::sinh(z) - z) / (4.0 * z * z * z * std::pow(std::cosh(0.5 * z), 2));
    EXPECT_NEAR(v.mean, expected, 4.0 * v.se) << "z=" << z;
  }
}

TEST(PolyaGamma, DependsOnlyOnAbsoluteTiltAndIsPositive) {
  Rng a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_pg1(2.5, a).value;
    EXPECT_EQ(x, sample_pg1(-2.5, b).value);
    EXPECT_GT(x, 0.0);
  }
  Rng c(6);
  for (int i = 0; i < 200; ++i) EXPECT_GT(sample_pg1(60.0, c).value, 0.0);
  EXPECT_NEAR(pg1_mean(1e-8), 0.25, 1e-15);
}
