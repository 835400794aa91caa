#pragma once

// Shared aliases, error types and the RNG used throughout the library.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace parni {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// All randomness flows through a caller-owned generator of this type.
using Rng = std::mt19937_64;

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent input data (dimension mismatch, bad response values).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid run or prior configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of a marginal-likelihood evaluation; samplers reject on these.
class EstimatorFailure : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public EstimatorFailure {
 public:
  NotPositiveDefinite() : EstimatorFailure("matrix is not numerically positive definite") {}
};

class NoConvergence : public EstimatorFailure {
 public:
  using EstimatorFailure::EstimatorFailure;
};

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_exponential(Rng& rng) {
  return std::exponential_distribution<double>(1.0)(rng);
}

/// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

inline double logit(double x) { return std::log(x) - std::log1p(-x); }

inline double inv_logit(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace parni
