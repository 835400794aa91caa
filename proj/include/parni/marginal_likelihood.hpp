#pragma once

// Estimators of the marginal likelihood p(y | gamma):
//   - Laplace approximation at the posterior mode (LA)
//   - approximate Laplace approximation at an arbitrary expansion point (ALA)
//   - ALA expanded at one IRLS step from a guessed linear predictor (adaptive ALA)
//   - importance sampling from the Laplace normal approximation with
//     AR(1)-correlated auxiliaries (CPM)
//   - the Polya-gamma conditional marginal likelihood for logistic models (DA)
// plus the warm-start inclusion probabilities built from ALA Bayes factors.
//
// Constants: LA, ALA, adaptive ALA and CPM carry every normalising constant of
// the likelihood and the coefficient prior. The DA conditional keeps the 2^{-n}
// factor and drops only the Polya-gamma density of omega at tilt zero, which is
// the same for every model.

#include "parni/numerics.hpp"
#include "parni/polya_gamma.hpp"

#include <string>
#include <utility>

namespace parni {

enum class Method { da_conditional, la, cpm, ala, adaptive_ala };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::da_conditional: return "da";
    case Method::la: return "la";
    case Method::cpm: return "cpm";
    case Method::ala: return "ala";
    case Method::adaptive_ala: return "adaptive-ala";
  }
  return "unknown";
}

inline Method parse_method(const std::string& s) {
  if (s == "da" || s == "DA") return Method::da_conditional;
  if (s == "la" || s == "LA") return Method::la;
  if (s == "cpm" || s == "CPM") return Method::cpm;
  if (s == "ala" || s == "ALA") return Method::ala;
  if (s == "adaptive-ala" || s == "adaptiveALA" || s == "adaptive_ala") return Method::adaptive_ala;
  throw ConfigError("unknown estimator '" + s + "'");
}

/// Whether repeated evaluation on the same inputs gives the same value.
inline bool is_deterministic(Method m) { return m != Method::cpm; }

struct MarglikResult {
  double log_value = 0.0;
  Method method = Method::la;
  std::optional<Vector> theta_hat;
  std::optional<Vector> eta_hat;
  double log_det_hessian = 0.0;
  Index dim = 0;
};

// ---------------------------------------------------------------------------
// LA / ALA
// ---------------------------------------------------------------------------

template <PredictorModel M>
MarglikResult log_marglik_la(const M& model, const Matrix& J, const ModelIndicator& gamma,
                             const PriorConfig& prior, const Vector& theta_init) {
  MapResult map = map_estimate(model, J, gamma, prior, theta_init);
  if (!map.converged) {
    throw NoConvergence("posterior mode search did not converge (gradient " +
                        std::to_string(map.grad_norm) + ")");
  }
  MarglikResult r;
  r.method = Method::la;
  r.dim = J.cols();
  r.log_det_hessian = map.hessian.log_det();
  r.log_value = map.log_lik + map.log_prior - 0.5 * r.log_det_hessian +
                0.5 * static_cast<double>(r.dim) * kLog2Pi;
  r.theta_hat = std::move(map.theta);
  r.eta_hat = std::move(map.eta);
  return r;
}

template <PredictorModel M>
MarglikResult log_marglik_la(const M& model, const ModelIndicator& gamma, const PriorConfig& prior,
                             const Vector& theta_init) {
  return log_marglik_la(model, design_matrix(model, gamma), gamma, prior, theta_init);
}

template <PredictorModel M>
MarglikResult log_marglik_la(const M& model, const ModelIndicator& gamma, const PriorConfig& prior) {
  const Matrix J = design_matrix(model, gamma);
  return log_marglik_la(model, J, gamma, prior, Vector(Vector::Zero(J.cols())));
}

/// ALA from an already-computed expansion at theta0.
inline MarglikResult ala_from_expansion(const PosteriorExpansion& e, Method tag) {
  const SpdFactor H = spd_factor_jittered(e.hessian);
  MarglikResult r;
  r.method = tag;
  r.dim = e.theta.size();
  r.log_det_hessian = H.log_det();
  r.log_value = e.log_lik + e.log_prior + 0.5 * static_cast<double>(r.dim) * kLog2Pi -
                0.5 * r.log_det_hessian + 0.5 * H.inverse_quad(e.grad);
  return r;
}

template <PredictorModel M>
MarglikResult log_marglik_ala(const M& model, const Matrix& J, const ModelIndicator& gamma,
                              const PriorConfig& prior, const Vector& theta0) {
  return ala_from_expansion(expand_posterior(model, J, gamma, prior, theta0), Method::ala);
}

template <PredictorModel M>
MarglikResult log_marglik_ala(const M& model, const ModelIndicator& gamma, const PriorConfig& prior,
                              const Vector& theta0) {
  return log_marglik_ala(model, design_matrix(model, gamma), gamma, prior, theta0);
}

/// ALA at the one-step IRLS iterate from a guessed linear predictor. The
/// derivatives at the guess can be shared across models.
template <PredictorModel M>
MarglikResult log_marglik_adaptive_ala(const M& model, const Matrix& J, const ModelIndicator& gamma,
                                       const PriorConfig& prior, const Vector& eta_guess,
                                       const GlmDerivatives& deriv_at_guess) {
  if (eta_guess.size() != model.n()) throw DataError("eta guess length does not match n");
  const Vector prec = prior_precision(model.fixed_design().cols(), gamma, prior);
  const Vector theta = irls_update(J, prec, eta_guess, deriv_at_guess);
  MarglikResult r = ala_from_expansion(expand_posterior(model, J, gamma, prior, theta), Method::adaptive_ala);
  return r;
}

template <PredictorModel M>
MarglikResult log_marglik_adaptive_ala(const M& model, const ModelIndicator& gamma,
                                       const PriorConfig& prior, const Vector& eta_guess) {
  return log_marglik_adaptive_ala(model, design_matrix(model, gamma), gamma, prior, eta_guess,
                                  model.derivatives(eta_guess));
}

// ---------------------------------------------------------------------------
// Correlated pseudo-marginal importance sampler
// ---------------------------------------------------------------------------

/// N x d_max standard-normal auxiliaries; models of dimension d use the first d columns.
struct CpmAuxiliary {
  Matrix u;
  double rho = 0.99;

  Index samples() const { return u.rows(); }
  Index max_dim() const { return u.cols(); }

  static CpmAuxiliary draw(Index samples, Index max_dim, double rho, Rng& rng) {
    if (samples < 1) throw ConfigError("CPM needs at least one importance sample");
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("CPM correlation must lie in [0,1)");
    CpmAuxiliary a;
    a.rho = rho;
    a.u.resize(samples, max_dim);
    for (Index c = 0; c < max_dim; ++c) {
      for (Index r = 0; r < samples; ++r) a.u(r, c) = standard_normal(rng);
    }
    return a;
  }
};

/// u' = rho u + sqrt(1 - rho^2) eps, elementwise.
inline CpmAuxiliary cpm_refresh(const CpmAuxiliary& aux, Rng& rng) {
  CpmAuxiliary out;
  out.rho = aux.rho;
  out.u.resize(aux.u.rows(), aux.u.cols());
  const double s = std::sqrt(1.0 - aux.rho * aux.rho);
  for (Index c = 0; c < aux.u.cols(); ++c) {
    for (Index r = 0; r < aux.u.rows(); ++r) {
      out.u(r, c) = aux.rho * aux.u(r, c) + s * standard_normal(rng);
    }
  }
  return out;
}

/// Importance-sampling estimate with the Laplace normal approximation as proposal.
template <PredictorModel M>
MarglikResult log_marglik_cpm(const M& model, const Matrix& J, const ModelIndicator& gamma,
                              const PriorConfig& prior, const CpmAuxiliary& aux,
                              const Vector& theta_init) {
  const Index d = J.cols();
  if (aux.samples() < 1) throw ConfigError("CPM needs at least one importance sample");
  if (d > aux.max_dim()) throw EstimatorFailure("model dimension exceeds the CPM auxiliary size");
  MapResult map = map_estimate(model, J, gamma, prior, theta_init);
  if (!map.converged) throw NoConvergence("posterior mode search did not converge");
  const Index q = model.fixed_design().cols();
  const double log_det = map.hessian.log_det();
  const double log_norm = -0.5 * static_cast<double>(d) * kLog2Pi + 0.5 * log_det;
  const Index N = aux.samples();
  double acc = kNegInf;
  for (Index i = 0; i < N; ++i) {
    const Vector ui = aux.u.row(i).head(d).transpose();
    const Vector theta = map.theta + map.hessian.inverse_transpose_apply(ui);
    const Vector eta = d == 0 ? Vector(Vector::Zero(model.n())) : Vector(J * theta);
    const double lw = model.log_likelihood(eta) + log_coeff_prior(theta, q, gamma, prior) -
                      (log_norm - 0.5 * ui.squaredNorm());
    if (std::isfinite(lw)) acc = log_add_exp(acc, lw);
  }
  if (!std::isfinite(acc)) throw EstimatorFailure("all importance weights vanished");
  MarglikResult r;
  r.method = Method::cpm;
  r.dim = d;
  r.log_det_hessian = log_det;
  r.log_value = acc - std::log(static_cast<double>(N));
  r.theta_hat = std::move(map.theta);
  r.eta_hat = std::move(map.eta);
  return r;
}

template <PredictorModel M>
MarglikResult log_marglik_cpm(const M& model, const ModelIndicator& gamma, const PriorConfig& prior,
                              const CpmAuxiliary& aux) {
  const Matrix J = design_matrix(model, gamma);
  return log_marglik_cpm(model, J, gamma, prior, aux, Vector(Vector::Zero(J.cols())));
}

// ---------------------------------------------------------------------------
// Polya-gamma data augmentation (logistic only)
// ---------------------------------------------------------------------------

namespace detail {

inline void require_logistic(const Dataset& data) {
  if (data.kind() != ModelKind::logistic) {
    throw ConfigError("data augmentation is only available for logistic regression");
  }
}

struct DaPosterior {
  SpdFactor lambda;
  Vector xi;
  Vector mean;
};

inline DaPosterior da_posterior(const Dataset& data, const Matrix& J, const ModelIndicator& gamma,
                                const PriorConfig& prior, const Vector& omega) {
  require_logistic(data);
  if (omega.size() != data.n()) throw DataError("omega length does not match n");
  if (!(omega.array() > 0.0).all()) throw DataError("Polya-gamma variables must be positive");
  Matrix lambda = J.transpose() * omega.asDiagonal() * J;
  lambda.diagonal() += prior_precision(data.q(), gamma, prior);
  DaPosterior post;
  post.lambda = spd_factor_jittered(lambda);
  post.xi = J.transpose() * (data.y().array() - 0.5).matrix();
  post.mean = post.lambda.solve(post.xi);
  return post;
}

}  // namespace detail

/// log p(y | gamma, omega) = -n log 2 - log|V|/2 - log|Lambda|/2 + xi^T Lambda^{-1} xi / 2.
inline MarglikResult da_conditional_logmarglik(const Dataset& data, const Matrix& J,
                                               const ModelIndicator& gamma, const PriorConfig& prior,
                                               const Vector& omega) {
  const detail::DaPosterior post = detail::da_posterior(data, J, gamma, prior, omega);
  MarglikResult r;
  r.method = Method::da_conditional;
  r.dim = J.cols();
  r.log_det_hessian = post.lambda.log_det();
  r.log_value = -static_cast<double>(data.n()) * std::numbers::ln2 -
                0.5 * log_det_prior_cov(data.q(), gamma, prior) - 0.5 * r.log_det_hessian +
                0.5 * post.xi.dot(post.mean);
  r.eta_hat = J.cols() == 0 ? Vector(Vector::Zero(data.n())) : Vector(J * post.mean);
  r.theta_hat = post.mean;
  return r;
}

inline MarglikResult da_conditional_logmarglik(const Dataset& data, const ModelIndicator& gamma,
                                               const PriorConfig& prior, const Vector& omega) {
  detail::require_logistic(data);
  GlmModel model(data);
  return da_conditional_logmarglik(data, design_matrix(model, gamma), gamma, prior, omega);
}

struct DaSweep {
  Vector theta;
  Vector omega;
};

/// theta ~ N(Lambda^{-1} xi, Lambda^{-1}), then omega_i ~ PG(1, eta_i) at eta = J theta.
inline DaSweep da_gibbs_sweep(const Dataset& data, const Matrix& J, const ModelIndicator& gamma,
                              const PriorConfig& prior, const Vector& omega, Rng& rng) {
  const detail::DaPosterior post = detail::da_posterior(data, J, gamma, prior, omega);
  Vector z(J.cols());
  for (Index i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
  DaSweep out;
  out.theta = post.mean + post.lambda.inverse_transpose_apply(z);
  const Vector eta = J.cols() == 0 ? Vector(Vector::Zero(data.n())) : Vector(J * out.theta);
  out.omega.resize(data.n());
  for (Index i = 0; i < eta.size(); ++i) out.omega[i] = sample_pg1(eta[i], rng).value;
  return out;
}

inline DaSweep da_gibbs_sweep(const Dataset& data, const ModelIndicator& gamma,
                              const PriorConfig& prior, const Vector& omega, Rng& rng) {
  detail::require_logistic(data);
  GlmModel model(data);
  return da_gibbs_sweep(data, design_matrix(model, gamma), gamma, prior, omega, rng);
}

// ---------------------------------------------------------------------------
// Warm-start inclusion probabilities
// ---------------------------------------------------------------------------

/// For every covariate j, P(gamma_j = 1 | gamma_{-j} = gamma0_{-j}) with the
/// Bayes factor taken from ALA expanded at the origin. Flipping one coordinate
/// of gamma0 is a rank-one border of the gamma0 Hessian, so all p Bayes factors
/// come from one factorisation plus a p-column cross product.
template <PredictorModel M>
Vector warm_start_pips(const M& model, const ModelIndicator& gamma0, const PriorConfig& prior) {
  const Matrix& X = model.free_design();
  const Index p = X.cols();
  const Index q = model.fixed_design().cols();
  const Matrix J = design_matrix(model, gamma0);
  const GlmDerivatives deriv = model.derivatives(Vector::Zero(model.n()));
  Matrix H = deriv.W.gram(J);
  H.diagonal() += prior_precision(q, gamma0, prior);
  const SpdFactor Hf = spd_factor_jittered(H);
  const Vector grad = J.transpose() * deriv.y_tilde;
  const Vector Hinv_grad = Hf.solve(grad);

  const Matrix cross = deriv.W.cross(J, X);  // J^T W X, d0 x p
  const Matrix Hinv_cross = Hf.solve(cross);
  const Vector quad = deriv.W.column_quad(X);
  const Vector xy = X.transpose() * deriv.y_tilde;
  const Matrix Hinv = gamma0.size() > 0 ? Hf.inverse() : Matrix(0, 0);

  const double log_g = std::log(prior.g);
  const std::size_t size_down_base = gamma0.size();
  Vector pip(p);
  for (Index j = 0; j < p; ++j) {
    double log_bf = 0.0;
    std::size_t size_down = size_down_base;
    if (!gamma0[static_cast<std::size_t>(j)]) {
      const double dj = quad[j] + 1.0 / prior.g - cross.col(j).dot(Hinv_cross.col(j));
      if (!(dj > 0.0)) throw NotPositiveDefinite();
      const double rj = xy[j] - cross.col(j).dot(Hinv_grad);
      log_bf = -0.5 * log_g - 0.5 * std::log(dj) + 0.5 * rj * rj / dj;
    } else {
      size_down = size_down_base - 1;
      const Index pos = q + static_cast<Index>(gamma0.rank_of(static_cast<std::size_t>(j)));
      const double s = 1.0 / Hinv(pos, pos);
      const double v = Hinv_grad[pos];
      log_bf = -0.5 * log_g - 0.5 * std::log(s) + 0.5 * s * v * v;
    }
    const double log_odds = log_bf + log_model_prior(size_down + 1, static_cast<std::size_t>(p), prior) -
                            log_model_prior(size_down, static_cast<std::size_t>(p), prior);
    pip[j] = std::clamp(inv_logit(log_odds), 1e-12, 1.0 - 1e-12);
  }
  return pip;
}

}  // namespace parni
