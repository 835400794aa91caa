#pragma once

// Test-only reference computations. Everything here is written directly from
// the defining formulas, without reusing library code paths.

#include "parni.hpp"

#include <functional>

namespace oracle {

using parni::Index;
using parni::Matrix;
using parni::Vector;

/// Gauss-Hermite nodes (Golub-Welsch) and log of w_i exp(t_i^2). The weights come
/// from normalised Hermite functions, 1 / sum_k psi_k(t)^2, which keeps their
/// relative accuracy at the outer nodes where eigenvector entries underflow.
inline std::pair<Vector, Vector> gauss_hermite(int m) {
  Matrix T = Matrix::Zero(m, m);
  for (int i = 1; i < m; ++i) {
    T(i, i - 1) = T(i - 1, i) = std::sqrt(i / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(T);
  const Vector t = es.eigenvalues();
  Vector log_w(m);
  for (int i = 0; i < m; ++i) {
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * t[i] * t[i]);
    double s = cur * cur;
    for (int k = 1; k < m; ++k) {
      const double next = std::sqrt(2.0 / k) * t[i] * cur - std::sqrt((k - 1.0) / k) * prev;
      prev = cur;
      cur = next;
      s += cur * cur;
    }
    log_w[i] = -std::log(s);
  }
  return {t, log_w};
}

/// log of int f(x) dx where log f is smooth and roughly Gaussian around (mu, sd),
/// using Gauss-Hermite after the change of variables x = mu + sqrt(2) sd t.
inline double log_integral_1d(const std::function<double(double)>& log_f, double mu, double sd, int m = 60) {
  const auto [t, log_w] = gauss_hermite(m);
  double acc = parni::kNegInf;
  for (int i = 0; i < m; ++i) {
    const double x = mu + std::sqrt(2.0) * sd * t[i];
    acc = parni::log_add_exp(acc, log_w[i] + log_f(x));
  }
  return acc + std::log(std::sqrt(2.0) * sd);
}

/// Plain Gaussian elimination with partial pivoting.
inline Vector gauss_solve(Matrix A, Vector b) {
  const Index n = A.rows();
  for (Index c = 0; c < n; ++c) {
    Index piv = c;
    for (Index r = c + 1; r < n; ++r) {
      if (std::abs(A(r, c)) > std::abs(A(piv, c))) piv = r;
    }
    A.row(c).swap(A.row(piv));
    std::swap(b[c], b[piv]);
    for (Index r = c + 1; r < n; ++r) {
      const double f = A(r, c) / A(c, c);
      A.row(r) -= f * A.row(c);
      b[r] -= f * b[c];
    }
  }
  Vector x(n);
  for (Index r = n; r-- > 0;) {
    double s = b[r];
    for (Index c = r + 1; c < n; ++c) s -= A(r, c) * x[c];
    x[r] = s / A(r, r);
  }
  return x;
}

/// log-determinant by the same elimination (A assumed positive definite).
inline double gauss_log_det(Matrix A) {
  const Index n = A.rows();
  double ld = 0.0;
  for (Index c = 0; c < n; ++c) {
    Index piv = c;
    for (Index r = c + 1; r < n; ++r) {
      if (std::abs(A(r, c)) > std::abs(A(piv, c))) piv = r;
    }
    A.row(c).swap(A.row(piv));
    ld += std::log(std::abs(A(c, c)));
    for (Index r = c + 1; r < n; ++r) A.row(r) -= (A(r, c) / A(c, c)) * A.row(c);
  }
  return ld;
}

/// Central-difference gradient.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// Central-difference Jacobian of a vector function.
inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h = 1e-5) {
  const Vector f0 = f(x);
  Matrix J(f0.size(), x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    J.col(i) = (f(a) - f(b)) / (2.0 * h);
  }
  return J;
}

/// Naive O(n^2) Breslow partial log-likelihood straight from the risk-set definition.
inline double cox_partial_naive(const Vector& time, const Vector& event, const Vector& eta) {
  const Index n = time.size();
  double ll = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (event[i] == 0.0) continue;
    double S = 0.0;
    for (Index l = 0; l < n; ++l) {
      if (time[l] >= time[i]) S += std::exp(eta[l]);
    }
    ll += eta[i] - std::log(S);
  }
  return ll;
}

inline double logistic_naive(const Vector& y, const Vector& eta) {
  double ll = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    // log mu = -log(1 + e^{-eta}), log(1 - mu) = -log(1 + e^{eta})
    ll += y[i] == 1.0 ? -std::log1p(std::exp(-eta[i])) : -std::log1p(std::exp(eta[i]));
  }
  return ll;
}

/// Weibull log-likelihood from density and survival function with hazard
/// k t^{k-1} exp(k eta): d log f + (1 - d) log S.
inline double weibull_naive(const Vector& time, const Vector& event, const Vector& eta, double k) {
  double ll = 0.0;
  for (Index i = 0; i < time.size(); ++i) {
    const double lambda = std::exp(k * eta[i]);
    const double H = lambda * std::pow(time[i], k);
    const double h = lambda * k * std::pow(time[i], k - 1.0);
    ll += event[i] * std::log(h) - H;
  }
  return ll;
}

/// Gaussian-response model with unit noise variance. Its posterior is exactly
/// normal, so every Laplace-type estimator is exact and the marginal likelihood
/// has the closed form N(y; 0, I + J V J^T).
class GaussianSurrogate {
 public:
  GaussianSurrogate(Matrix X, Matrix Z, Vector y) : X_(std::move(X)), Z_(std::move(Z)), y_(std::move(y)) {}

  Index n() const { return y_.size(); }
  const Matrix& fixed_design() const { return Z_; }
  const Matrix& free_design() const { return X_; }
  double log_likelihood(const Vector& eta) const {
    return -0.5 * static_cast<double>(n()) * parni::kLog2Pi - 0.5 * (y_ - eta).squaredNorm();
  }
  parni::GlmDerivatives derivatives(const Vector& eta) const {
    return {eta - y_, parni::Curvature::diagonal(Vector::Ones(n()))};
  }
  const Vector& y() const { return y_; }

 private:
  Matrix X_;
  Matrix Z_;
  Vector y_;
};

inline double gaussian_log_marglik(const GaussianSurrogate& m, const parni::ModelIndicator& gamma,
                                   const parni::PriorConfig& prior) {
  const Matrix J = parni::design_matrix(m, gamma);
  const Vector v = parni::prior_precision(m.fixed_design().cols(), gamma, prior).cwiseInverse();
  Matrix S = Matrix::Identity(m.n(), m.n());
  if (J.cols() > 0) S += J * v.asDiagonal() * J.transpose();
  const double ld = gauss_log_det(S);
  const Vector sol = gauss_solve(S, m.y());
  return -0.5 * static_cast<double>(m.n()) * parni::kLog2Pi - 0.5 * ld - 0.5 * m.y().dot(sol);
}

/// Small random data sets of each kind, with mild signal.
inline parni::Dataset random_dataset(parni::ModelKind kind, Index n, Index p, Index q, std::uint64_t seed,
                                     bool ties = false) {
  parni::Rng rng(seed);
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) X(i, j) = parni::standard_normal(rng);
  }
  Matrix Z(n, q);
  if (q > 0) Z.col(0).setOnes();
  for (Index j = 1; j < q; ++j) {
    for (Index i = 0; i < n; ++i) Z(i, j) = parni::standard_normal(rng);
  }
  Vector beta = Vector::Zero(p);
  for (Index j = 0; j < std::min<Index>(p, 2); ++j) beta[j] = j == 0 ? 1.0 : -0.8;
  const Vector eta = X * beta;
  if (kind == parni::ModelKind::logistic) {
    Vector y(n);
    for (Index i = 0; i < n; ++i) y[i] = parni::uniform01(rng) < parni::inv_logit(eta[i]) ? 1.0 : 0.0;
    return parni::Dataset::logistic(X, Z, y);
  }
  Vector t(n), d(n);
  for (Index i = 0; i < n; ++i) {
    t[i] = parni::standard_exponential(rng) * std::exp(-eta[i]);
    if (ties) t[i] = std::ceil(t[i] * 4.0) / 4.0;
    d[i] = parni::uniform01(rng) < 0.75 ? 1.0 : 0.0;
  }
  return parni::Dataset::survival(kind, X, Z, t, d);
}

inline parni::ModelIndicator random_model(std::size_t p, parni::Rng& rng, double prob = 0.5) {
  parni::ModelIndicator m(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (parni::uniform01(rng) < prob) m.set(j, true);
  }
  return m;
}

}  // namespace oracle
