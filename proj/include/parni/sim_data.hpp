#pragma once

// Simulated benchmark data: AR(1)-correlated Gaussian designs, logistic
// responses, and generalised-gamma accelerated-failure-time survival times.

#include "parni/model_core.hpp"

#include <algorithm>
#include <optional>

namespace parni {

enum class Censoring { none, administrative, uniform };

struct SimConfig {
  Index n = 500;
  Index p = 200;
  double ar_rho = 0.6;
  std::optional<Vector> beta;  // default: default_beta(p)
  double sigma = 0.8;
  double q_shape = -2.0;
  double aft_sign = -1.0;  // log T = aft_sign * eta + sigma * w
  Censoring censoring = Censoring::administrative;
  double event_fraction = 0.7;  // target fraction of observed events
  bool intercept = false;       // add a column of ones as a fixed covariate
  std::uint64_t seed = 1;

  void validate() const {
    if (n < 1 || p < 1) throw ConfigError("simulation needs n >= 1 and p >= 1");
    if (!(ar_rho > -1.0 && ar_rho < 1.0)) throw ConfigError("AR correlation must lie in (-1, 1)");
    if (!(sigma > 0.0)) throw ConfigError("survival scale sigma must be positive");
    if (q_shape == 0.0) throw ConfigError("generalised-gamma shape q must be non-zero");
    if (beta && beta->size() != p) throw ConfigError("beta length does not match p");
    if (!(event_fraction > 0.0 && event_fraction <= 1.0)) throw ConfigError("event fraction must lie in (0,1]");
  }

  Vector coefficients() const { return beta ? *beta : default_beta(p); }

  /// (2, -3, 2, 2, -3, 3, -2, 3, -2, 3, 0, ..., 0), truncated when p < 10.
  static Vector default_beta(Index p) {
    static constexpr double head[10] = {2, -3, 2, 2, -3, 3, -2, 3, -2, 3};
    Vector b = Vector::Zero(p);
    for (Index j = 0; j < std::min<Index>(p, 10); ++j) b[j] = head[j];
    return b;
  }
};

/// Rows i.i.d. N(0, Sigma) with Sigma_ij = rho^|i-j|, via x_j = rho x_{j-1} + sqrt(1-rho^2) e_j.
inline Matrix gen_design(const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  Matrix X(cfg.n, cfg.p);
  const double s = std::sqrt(1.0 - cfg.ar_rho * cfg.ar_rho);
  for (Index i = 0; i < cfg.n; ++i) {
    double prev = standard_normal(rng);
    X(i, 0) = prev;
    for (Index j = 1; j < cfg.p; ++j) {
      prev = cfg.ar_rho * prev + s * standard_normal(rng);
      X(i, j) = prev;
    }
  }
  return X;
}

namespace detail {

inline Matrix sim_fixed(const SimConfig& cfg) {
  return cfg.intercept ? Matrix(Matrix::Ones(cfg.n, 1)) : Matrix(cfg.n, 0);
}

inline void sim_names(Dataset& d) {
  d.free_names.clear();
  for (Index j = 0; j < d.p(); ++j) d.free_names.push_back("x" + std::to_string(j + 1));
  d.fixed_names.clear();
  if (d.q() == 1) d.fixed_names.push_back("intercept");
}

inline double empirical_quantile(Vector v, double prob) {
  std::sort(v.data(), v.data() + v.size());
  const double pos = prob * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<Index>(std::floor(pos));
  const Index hi = std::min<Index>(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace detail

inline Dataset gen_logistic(const SimConfig& cfg, Rng& rng) {
  Matrix X = gen_design(cfg, rng);
  const Vector eta = X * cfg.coefficients();
  Vector y(cfg.n);
  for (Index i = 0; i < cfg.n; ++i) y[i] = uniform01(rng) < inv_logit(eta[i]) ? 1.0 : 0.0;
  Dataset d = Dataset::logistic(std::move(X), detail::sim_fixed(cfg), std::move(y));
  detail::sim_names(d);
  return d;
}

/// Standardised generalised-gamma error with shape q: w = log(q^2 G) / q, G ~ Gamma(q^-2, 1).
inline double gen_gamma_error(double q, Rng& rng) {
  const double shape = 1.0 / (q * q);
  const double G = std::gamma_distribution<double>(shape, 1.0)(rng);
  return (std::log(q * q) + std::log(G)) / q;
}

/// Latent event times only (no censoring), for checks on the generator.
inline Vector gen_event_times(const SimConfig& cfg, const Vector& eta, Rng& rng) {
  Vector t(eta.size());
  for (Index i = 0; i < eta.size(); ++i) {
    t[i] = std::exp(cfg.aft_sign * eta[i] + cfg.sigma * gen_gamma_error(cfg.q_shape, rng));
  }
  return t;
}

inline Dataset gen_survival(const SimConfig& cfg, ModelKind kind, Rng& rng) {
  if (kind == ModelKind::logistic) throw ConfigError("survival simulation needs cox or weibull");
  Matrix X = gen_design(cfg, rng);
  const Vector eta = X * cfg.coefficients();
  Vector t = gen_event_times(cfg, eta, rng);
  Vector d = Vector::Ones(cfg.n);
  if (cfg.censoring == Censoring::administrative && cfg.event_fraction < 1.0) {
    const double c = detail::empirical_quantile(t, cfg.event_fraction);
    for (Index i = 0; i < cfg.n; ++i) {
      if (t[i] > c) {
        t[i] = c;
        d[i] = 0.0;
      }
    }
  } else if (cfg.censoring == Censoring::uniform && cfg.event_fraction < 1.0) {
    // C_i ~ U(0, u) with u chosen so the expected event fraction given t is the target.
    auto expected = [&t](double u) {
      double s = 0.0;
      for (Index i = 0; i < t.size(); ++i) s += std::max(0.0, 1.0 - t[i] / u);
      return s / static_cast<double>(t.size());
    };
    double lo = t.minCoeff();
    double hi = t.maxCoeff();
    while (expected(hi) < cfg.event_fraction) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (expected(mid) < cfg.event_fraction ? lo : hi) = mid;
    }
    for (Index i = 0; i < cfg.n; ++i) {
      const double c = (1.0 - uniform01(rng)) * hi;
      if (c < t[i]) {
        t[i] = c;
        d[i] = 0.0;
      }
    }
  }
  Dataset data = Dataset::survival(kind, std::move(X), detail::sim_fixed(cfg), std::move(t), std::move(d));
  detail::sim_names(data);
  return data;
}

inline Dataset simulate(const SimConfig& cfg, ModelKind kind) {
  Rng rng(cfg.seed);
  return kind == ModelKind::logistic ? gen_logistic(cfg, rng) : gen_survival(cfg, kind, rng);
}

}  // namespace parni
