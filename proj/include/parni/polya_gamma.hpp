#pragma once

// Exact PG(1, z) sampler.
//
// Draws J*(1, z/2) by Devroye-style alternating-series rejection from a
// proposal that mixes a truncated inverse-Gaussian on (0, t] with an
// exponential tail on (t, inf), t = 0.64, then scales by 1/4.
//
// References:
//   Polson, Scott and Windle (2013), Bayesian inference for logistic models
//   using Polya-gamma latent variables, JASA 108, 1339-1349.
//   Devroye (1986), Non-Uniform Random Variate Generation, Ch. IV.5.

#include "parni/core.hpp"

namespace parni {

struct PgDraw {
  double value = 0.0;
};

namespace pg_detail {

inline constexpr double kTrunc = 0.64;
inline constexpr double kPi = std::numbers::pi;

inline double log_norm_cdf(double x) {
  if (x > -30.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  // Asymptotic tail, accurate well below the erfc underflow point.
  const double x2 = x * x;
  return -0.5 * x2 - std::log(-x) - 0.5 * kLog2Pi + std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

// n-th coefficient of the alternating series for the J*(1, 0) density.
inline double a_coef(int n, double x) {
  const double k = (n + 0.5) * kPi;
  if (x > kTrunc) return k * std::exp(-0.5 * k * k * x);
  if (x <= 0.0) return 0.0;
  const double lg = std::log(k) - 1.5 * (std::log(0.5 * kPi) + std::log(x)) -
                    2.0 * (n + 0.5) * (n + 0.5) / x;
  return std::exp(lg);
}

// Probability of drawing from the exponential tail piece of the proposal.
inline double mass_texpon(double z) {
  const double t = kTrunc;
  const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  const double b = std::sqrt(1.0 / t) * (t * z - 1.0);
  const double a = -std::sqrt(1.0 / t) * (t * z + 1.0);
  const double x0 = std::log(fz) + fz * t;
  const double xb = x0 - z + log_norm_cdf(b);
  const double xa = x0 + z + log_norm_cdf(a);
  const double qdivp = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + qdivp);
}

// Inverse-Gaussian IG(1/z, 1) truncated to (0, t].
inline double rtigauss(double z, Rng& rng) {
  const double t = kTrunc;
  z = std::abs(z);
  const double mu = z > 0.0 ? 1.0 / z : std::numeric_limits<double>::infinity();
  double x = t + 1.0;
  if (mu > t) {
    double alpha = 0.0;
    while (uniform01(rng) > alpha) {
      double e1 = 0.0;
      double e2 = 0.0;
      do {
        e1 = standard_exponential(rng);
        e2 = standard_exponential(rng);
      } while (e1 * e1 > 2.0 * e2 / t);
      x = t / ((1.0 + t * e1) * (1.0 + t * e1));
      alpha = std::exp(-0.5 * z * z * x);
    }
  } else {
    while (x > t) {
      const double nrm = standard_normal(rng);
      const double y = nrm * nrm;
      x = mu + 0.5 * mu * mu * y - 0.5 * mu * std::sqrt(4.0 * mu * y + (mu * y) * (mu * y));
      if (uniform01(rng) > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

}  // namespace pg_detail

/// Exact draw from PG(1, z); depends on z only through |z|.
inline PgDraw sample_pg1(double z, Rng& rng) {
  using namespace pg_detail;
  const double half = 0.5 * std::abs(z);
  const double fz = 0.125 * kPi * kPi + 0.5 * half * half;
  const double p_exp = mass_texpon(half);
  for (;;) {
    double x = 0.0;
    if (uniform01(rng) < p_exp) {
      x = kTrunc + standard_exponential(rng) / fz;
    } else {
      x = rtigauss(half, rng);
    }
    double s = a_coef(0, x);
    const double y = uniform01(rng) * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= a_coef(n, x);
        if (y <= s) return {0.25 * x};
      } else {
        s += a_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

/// E[PG(1, z)] = tanh(z/2) / (2z), with limit 1/4 at z = 0.
inline double pg1_mean(double z) {
  const double a = std::abs(z);
  if (a < 1e-6) return 0.25 - a * a / 48.0;
  return std::tanh(0.5 * a) / (2.0 * a);
}

}  // namespace parni
