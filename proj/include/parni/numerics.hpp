#pragma once

// SPD factorisation and Newton / IRLS optimisation of the log-posterior of the
// regression coefficients under a fixed model.

#include "parni/model_core.hpp"

#include <Eigen/Cholesky>

namespace parni {

/// Cholesky factor M = L L^T with its log-determinant.
class SpdFactor {
 public:
  SpdFactor() = default;

  Index dim() const { return dim_; }
  double log_det() const { return log_det_; }
  Matrix lower() const { return dim_ == 0 ? Matrix(0, 0) : Matrix(llt_.matrixL()); }

  Vector solve(const Vector& b) const {
    if (dim_ == 0) return Vector(0);
    return llt_.solve(b);
  }

  Matrix solve(const Matrix& B) const {
    if (dim_ == 0) return Matrix(0, B.cols());
    return llt_.solve(B);
  }

  Matrix inverse() const { return solve(Matrix(Matrix::Identity(dim_, dim_))); }

  /// L^{-T} u: maps a standard-normal vector to a draw with covariance M^{-1}.
  Vector inverse_transpose_apply(const Vector& u) const {
    if (dim_ == 0) return Vector(0);
    return llt_.matrixU().solve(u);
  }

  /// b^T M^{-1} b
  double inverse_quad(const Vector& b) const {
    if (dim_ == 0) return 0.0;
    const Vector z = llt_.matrixL().solve(b);
    return z.squaredNorm();
  }

  friend SpdFactor spd_factor(const Matrix& M);

 private:
  Eigen::LLT<Matrix> llt_;
  Index dim_ = 0;
  double log_det_ = 0.0;
};

/// Throws NotPositiveDefinite when the Cholesky factorisation breaks down.
inline SpdFactor spd_factor(const Matrix& M) {
  if (M.rows() != M.cols()) throw DataError("spd_factor needs a square matrix");
  SpdFactor f;
  f.dim_ = M.rows();
  if (f.dim_ == 0) return f;
  if (!M.allFinite()) throw NotPositiveDefinite();
  f.llt_.compute(M);
  if (f.llt_.info() != Eigen::Success) throw NotPositiveDefinite();
  const auto diag = f.llt_.matrixLLT().diagonal();
  for (Index i = 0; i < diag.size(); ++i) {
    if (!(diag[i] > 0.0) || !std::isfinite(diag[i])) throw NotPositiveDefinite();
  }
  f.log_det_ = 2.0 * diag.array().log().sum();
  return f;
}

/// One retry with 1e-8 (1 + max diagonal) added to the diagonal.
inline SpdFactor spd_factor_jittered(const Matrix& M) {
  try {
    return spd_factor(M);
  } catch (const NotPositiveDefinite&) {
    Matrix J = M;
    const double jitter = 1e-8 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
    J.diagonal().array() += jitter;
    return spd_factor(J);
  }
}

/// Log-posterior pieces of theta under a fixed model: value, gradient and
/// Hessian of the negated log-posterior, and the derivatives in eta.
struct PosteriorExpansion {
  Vector theta;
  Vector eta;
  double log_lik = 0.0;
  double log_prior = 0.0;
  Vector grad;     // gradient of the negated log-posterior
  Matrix hessian;  // Hessian of the negated log-posterior
  GlmDerivatives deriv;

  double neg_log_post() const { return -(log_lik + log_prior); }
};

template <PredictorModel M>
PosteriorExpansion expand_posterior(const M& model, const Matrix& J, const ModelIndicator& gamma,
                                    const PriorConfig& prior, const Vector& theta) {
  const Index q = model.fixed_design().cols();
  if (theta.size() != J.cols()) throw DataError("coefficient vector length does not match model size");
  PosteriorExpansion e;
  e.theta = theta;
  e.eta = J.cols() == 0 ? Vector(Vector::Zero(model.n())) : Vector(J * theta);
  e.log_lik = model.log_likelihood(e.eta);
  e.log_prior = log_coeff_prior(theta, q, gamma, prior);
  e.deriv = model.derivatives(e.eta);
  const Vector prec = prior_precision(q, gamma, prior);
  e.grad = J.transpose() * e.deriv.y_tilde + prec.cwiseProduct(theta);
  e.hessian = e.deriv.W.gram(J);
  e.hessian.diagonal() += prec;
  return e;
}

/// Negated log-posterior only; cheaper than a full expansion.
template <PredictorModel M>
double neg_log_posterior(const M& model, const Matrix& J, const ModelIndicator& gamma,
                         const PriorConfig& prior, const Vector& theta) {
  const Vector eta = J.cols() == 0 ? Vector(Vector::Zero(model.n())) : Vector(J * theta);
  return -(model.log_likelihood(eta) +
           log_coeff_prior(theta, model.fixed_design().cols(), gamma, prior));
}

/// IRLS update from a linear predictor eta with derivatives evaluated there:
///   theta = (J^T W J + V^{-1})^{-1} J^T W (eta - W^{-1} y_tilde).
/// When W is not an invertible diagonal (Cox) the right-hand side is formed as
/// J^T W eta - J^T y_tilde, which is the same quantity without W^{-1}.
inline Vector irls_update(const Matrix& J, const Vector& prec, const Vector& eta,
                          const GlmDerivatives& deriv) {
  if (J.cols() == 0) return Vector(0);
  Matrix lhs = deriv.W.gram(J);
  lhs.diagonal() += prec;
  Vector rhs;
  const auto& w = deriv.W.diag_part();
  if (deriv.W.is_diagonal() && (w.array() > 0.0).all()) {
    const Vector working = eta - deriv.y_tilde.cwiseQuotient(w);
    rhs = J.transpose() * w.cwiseProduct(working);
  } else {
    rhs = J.transpose() * deriv.W.apply(eta) - J.transpose() * deriv.y_tilde;
  }
  return spd_factor_jittered(lhs).solve(rhs);
}

enum class NewtonForm { direct, irls };

/// theta0 - H^{-1} g at theta0, in either the direct or the IRLS arrangement.
template <PredictorModel M>
Vector newton_one_step(const M& model, const ModelIndicator& gamma, const PriorConfig& prior,
                       const Vector& theta0, NewtonForm form = NewtonForm::direct) {
  const Matrix J = design_matrix(model, gamma);
  if (theta0.size() != J.cols()) throw DataError("coefficient vector length does not match model size");
  if (J.cols() == 0) return Vector(0);
  if (form == NewtonForm::direct) {
    const PosteriorExpansion e = expand_posterior(model, J, gamma, prior, theta0);
    return theta0 - spd_factor_jittered(e.hessian).solve(e.grad);
  }
  const Vector eta = J * theta0;
  const GlmDerivatives deriv = model.derivatives(eta);
  return irls_update(J, prior_precision(model.fixed_design().cols(), gamma, prior), eta, deriv);
}

struct MapOptions {
  double grad_tol = 1e-8;
  int max_iter = 100;
  int max_halvings = 30;
};

struct MapResult {
  Vector theta;
  Vector eta;
  SpdFactor hessian;  // factor of the negated-Hessian at the returned iterate
  double log_lik = 0.0;
  double log_prior = 0.0;
  double grad_norm = 0.0;  // max-norm
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton iterations (step halving on the negated log-posterior) to the
/// posterior mode. Non-convergence is reported through the flag; the best
/// iterate is returned either way.
template <PredictorModel M>
MapResult map_estimate(const M& model, const Matrix& J, const ModelIndicator& gamma,
                       const PriorConfig& prior, const Vector& theta_init, MapOptions opt = {}) {
  if (theta_init.size() != J.cols()) throw DataError("initial coefficient length does not match model size");
  MapResult r;
  PosteriorExpansion e = expand_posterior(model, J, gamma, prior, theta_init);
  double f = e.neg_log_post();
  if (!std::isfinite(f)) {
    e = expand_posterior(model, J, gamma, prior, Vector(Vector::Zero(J.cols())));
    f = e.neg_log_post();
  }
  int it = 0;
  bool stalled = false;
  for (; it < opt.max_iter; ++it) {
    const double gnorm = e.grad.size() == 0 ? 0.0 : e.grad.cwiseAbs().maxCoeff();
    if (gnorm < opt.grad_tol) break;
    const Vector step = spd_factor_jittered(e.hessian).solve(e.grad);
    double t = 1.0;
    bool moved = false;
    const double slack = 1e-12 * (1.0 + std::abs(f));
    for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
      const Vector cand = e.theta - t * step;
      const double fc = neg_log_posterior(model, J, gamma, prior, cand);
      if (std::isfinite(fc) && fc <= f + slack) {
        e = expand_posterior(model, J, gamma, prior, cand);
        f = e.neg_log_post();
        moved = true;
        break;
      }
    }
    if (!moved) {
      stalled = true;
      break;
    }
  }
  r.grad_norm = e.grad.size() == 0 ? 0.0 : e.grad.cwiseAbs().maxCoeff();
  r.converged = !stalled && r.grad_norm < opt.grad_tol;
  r.iterations = it;
  r.hessian = spd_factor_jittered(e.hessian);
  r.theta = std::move(e.theta);
  r.eta = std::move(e.eta);
  r.log_lik = e.log_lik;
  r.log_prior = e.log_prior;
  return r;
}

template <PredictorModel M>
MapResult map_estimate(const M& model, const ModelIndicator& gamma, const PriorConfig& prior,
                       const Vector& theta_init, MapOptions opt = {}) {
  return map_estimate(model, design_matrix(model, gamma), gamma, prior, theta_init, opt);
}

}  // namespace parni
