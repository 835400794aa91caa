#pragma once

// Model indicators, data sets, priors, and the likelihood derivatives with
// respect to the linear predictor for logistic, Cox partial-likelihood and
// Weibull regression.

#include "parni/core.hpp"

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace parni {

// ---------------------------------------------------------------------------
// ModelIndicator
// ---------------------------------------------------------------------------

/// Binary inclusion vector over the p free covariates, with the sorted list of
/// included positions kept alongside.
class ModelIndicator {
 public:
  ModelIndicator() = default;

  explicit ModelIndicator(std::size_t p) : bits_(p, 0) {
    if (p == 0) throw ConfigError("model indicator needs p >= 1");
  }

  static ModelIndicator from_bits(const std::vector<int>& bits) {
    ModelIndicator m(bits.size());
    for (std::size_t j = 0; j < bits.size(); ++j) {
      if (bits[j] != 0) m.set(j, true);
    }
    return m;
  }

  static ModelIndicator from_included(std::size_t p, const std::vector<Index>& included) {
    ModelIndicator m(p);
    for (Index j : included) m.set(static_cast<std::size_t>(j), true);
    return m;
  }

  std::size_t p() const { return bits_.size(); }
  std::size_t size() const { return included_.size(); }
  bool operator[](std::size_t j) const { return bits_[j] != 0; }
  const std::vector<Index>& included() const { return included_; }

  void set(std::size_t j, bool on) {
    if (j >= bits_.size()) throw ConfigError("model indicator position out of range");
    if ((bits_[j] != 0) == on) return;
    bits_[j] = on ? 1 : 0;
    const auto pos = std::lower_bound(included_.begin(), included_.end(), static_cast<Index>(j));
    if (on) {
      included_.insert(pos, static_cast<Index>(j));
    } else {
      included_.erase(pos);
    }
  }

  void flip(std::size_t j) { set(j, !(*this)[j]); }

  ModelIndicator flipped(std::size_t j) const {
    ModelIndicator m = *this;
    m.flip(j);
    return m;
  }

  /// Ordered position of covariate j among the included ones; j must be included.
  std::size_t rank_of(std::size_t j) const {
    const auto it = std::lower_bound(included_.begin(), included_.end(), static_cast<Index>(j));
    return static_cast<std::size_t>(it - included_.begin());
  }

  std::size_t hamming(const ModelIndicator& other) const {
    std::size_t d = 0;
    for (std::size_t j = 0; j < bits_.size(); ++j) d += bits_[j] != other.bits_[j];
    return d;
  }

  bool operator==(const ModelIndicator& other) const { return bits_ == other.bits_; }

  std::size_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (Index j : included_) {
      h ^= static_cast<std::uint64_t>(j) + 0x9e3779b97f4a7c15ULL;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h ^ bits_.size());
  }

 private:
  std::vector<std::uint8_t> bits_;
  std::vector<Index> included_;
};

struct ModelIndicatorHash {
  std::size_t operator()(const ModelIndicator& m) const { return m.hash(); }
};

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

enum class ModelKind { logistic, cox_partial, weibull };

inline std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::logistic: return "logistic";
    case ModelKind::cox_partial: return "cox";
    case ModelKind::weibull: return "weibull";
  }
  return "unknown";
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "logistic") return ModelKind::logistic;
  if (s == "cox" || s == "cox-partial" || s == "cox_partial") return ModelKind::cox_partial;
  if (s == "weibull") return ModelKind::weibull;
  throw ConfigError("unknown model kind '" + s + "'");
}

/// Risk-set layout for survival data: observations sorted by ascending time and
/// grouped by distinct time. The risk set of group k is every sorted position
/// from group_begin[k] onwards.
struct RiskSets {
  std::vector<Index> order;
  std::vector<Index> group_begin;  // size groups + 1, last entry is n
  std::vector<double> events;      // event count per group
  std::vector<Index> group_of;     // group of each observation, original indexing

  std::size_t groups() const { return events.size(); }

  static RiskSets build(const Vector& time, const Vector& event) {
    RiskSets rs;
    const Index n = time.size();
    rs.order.resize(static_cast<std::size_t>(n));
    std::iota(rs.order.begin(), rs.order.end(), Index{0});
    std::stable_sort(rs.order.begin(), rs.order.end(),
                     [&](Index a, Index b) { return time[a] < time[b]; });
    rs.group_of.assign(static_cast<std::size_t>(n), 0);
    for (Index pos = 0; pos < n; ++pos) {
      const Index i = rs.order[static_cast<std::size_t>(pos)];
      if (pos == 0 || time[i] != time[rs.order[static_cast<std::size_t>(pos - 1)]]) {
        rs.group_begin.push_back(pos);
        rs.events.push_back(0.0);
      }
      rs.events.back() += event[i];
      rs.group_of[static_cast<std::size_t>(i)] = static_cast<Index>(rs.events.size() - 1);
    }
    rs.group_begin.push_back(n);
    return rs;
  }
};

/// Column centring/scaling applied to X at ingestion, kept so coefficients can
/// be mapped back to the original scale.
struct ColumnScaling {
  bool applied = false;
  Vector center;
  Vector scale;
};

/// Centres each column and scales it to unit sample variance. Throws DataError on a
/// constant column.
inline ColumnScaling standardize_columns(Matrix& X, const std::vector<std::string>& names = {}) {
  ColumnScaling s;
  s.applied = true;
  s.center = Vector::Zero(X.cols());
  s.scale = Vector::Ones(X.cols());
  if (X.rows() < 2) return s;
  for (Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    const double var = (X.col(j).array() - mean).square().sum() / static_cast<double>(X.rows() - 1);
    if (!(var > 0.0)) {
      const std::string name = j < static_cast<Index>(names.size()) ? names[static_cast<std::size_t>(j)]
                                                                     : std::to_string(j);
      throw DataError("covariate '" + name + "' is constant");
    }
    s.center[j] = mean;
    s.scale[j] = std::sqrt(var);
    X.col(j) = (X.col(j).array() - mean) / s.scale[j];
  }
  return s;
}

/// Immutable response + design container. Survival kinds carry times and event
/// flags; the logistic kind carries a 0/1 response.
class Dataset {
 public:
  static Dataset logistic(Matrix X, Matrix Z, Vector y) {
    Dataset d(ModelKind::logistic, std::move(X), std::move(Z));
    if (y.size() != d.n()) throw DataError("response length does not match design rows");
    for (Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0) {
        throw DataError("logistic response must be 0 or 1 (row " + std::to_string(i + 1) + ")");
      }
    }
    d.y_ = std::move(y);
    return d;
  }

  static Dataset survival(ModelKind kind, Matrix X, Matrix Z, Vector time, Vector event) {
    if (kind == ModelKind::logistic) throw DataError("survival data needs a survival model kind");
    Dataset d(kind, std::move(X), std::move(Z));
    if (time.size() != d.n() || event.size() != d.n()) {
      throw DataError("time/event length does not match design rows");
    }
    for (Index i = 0; i < time.size(); ++i) {
      if (!(time[i] > 0.0) || !std::isfinite(time[i])) {
        throw DataError("survival time must be strictly positive (row " + std::to_string(i + 1) + ")");
      }
      if (event[i] != 0.0 && event[i] != 1.0) {
        throw DataError("event flag must be 0 or 1 (row " + std::to_string(i + 1) + ")");
      }
    }
    d.time_ = std::move(time);
    d.event_ = std::move(event);
    d.log_time_ = d.time_.array().log();
    if (kind == ModelKind::cox_partial) {
      d.risk_ = std::make_shared<const RiskSets>(RiskSets::build(d.time_, d.event_));
    }
    return d;
  }

  ModelKind kind() const { return kind_; }
  Index n() const { return X_.rows(); }
  Index p() const { return X_.cols(); }
  Index q() const { return Z_.cols(); }
  const Matrix& X() const { return X_; }
  const Matrix& Z() const { return Z_; }
  const Vector& y() const { return y_; }
  const Vector& time() const { return time_; }
  const Vector& log_time() const { return log_time_; }
  const Vector& event() const { return event_; }
  const std::shared_ptr<const RiskSets>& risk_sets() const { return risk_; }

  const ColumnScaling& scaling() const { return scaling_; }
  void set_scaling(ColumnScaling s) { scaling_ = std::move(s); }

  std::vector<std::string> free_names;
  std::vector<std::string> fixed_names;

 private:
  Dataset(ModelKind kind, Matrix X, Matrix Z) : kind_(kind), X_(std::move(X)), Z_(std::move(Z)) {
    if (X_.cols() < 1) throw DataError("at least one free covariate is required");
    if (Z_.size() == 0) Z_.resize(X_.rows(), 0);
    if (Z_.rows() != X_.rows()) throw DataError("fixed and free designs have different row counts");
    if (!X_.allFinite() || !Z_.allFinite()) throw DataError("design contains non-finite values");
  }

  ModelKind kind_;
  Matrix X_;
  Matrix Z_;
  Vector y_;
  Vector time_;
  Vector log_time_;
  Vector event_;
  std::shared_ptr<const RiskSets> risk_;
  ColumnScaling scaling_;
};

// ---------------------------------------------------------------------------
// Priors
// ---------------------------------------------------------------------------

struct FixedInclusion {
  double h = 0.5;
};

/// Beta-binomial model prior with the inclusion probability integrated out.
struct BetaBinomial {
  double a = 1.0;
  double b = 1.0;
};

struct PriorConfig {
  double g = 1.0;               // slab variance; starting value when hierarchical
  bool hierarchical_g = false;  // half-Cauchy on sqrt(g), updated within the chain
  double sigma_alpha_sq = 100.0;
  std::variant<FixedInclusion, BetaBinomial> model_prior = FixedInclusion{};
  double sigma_k_sq = 1e5;  // prior variance of log Weibull shape

  void validate() const {
    if (!(g > 0.0)) throw ConfigError("slab variance g must be positive");
    if (!(sigma_alpha_sq > 0.0)) throw ConfigError("sigma_alpha_sq must be positive");
    if (!(sigma_k_sq > 0.0)) throw ConfigError("sigma_k_sq must be positive");
    if (const auto* f = std::get_if<FixedInclusion>(&model_prior)) {
      if (!(f->h > 0.0 && f->h < 1.0)) throw ConfigError("inclusion probability h must lie in (0,1)");
    } else {
      const auto& bb = std::get<BetaBinomial>(model_prior);
      if (!(bb.a > 0.0 && bb.b > 0.0)) throw ConfigError("beta-binomial a and b must be positive");
    }
  }

  PriorConfig with_g(double new_g) const {
    PriorConfig c = *this;
    c.g = new_g;
    return c;
  }
};

inline double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// log p(gamma) for a model of the given size out of p covariates.
inline double log_model_prior(std::size_t size, std::size_t p, const PriorConfig& prior) {
  const double k = static_cast<double>(size);
  const double rest = static_cast<double>(p) - k;
  if (const auto* f = std::get_if<FixedInclusion>(&prior.model_prior)) {
    return k * std::log(f->h) + rest * std::log1p(-f->h);
  }
  const auto& bb = std::get<BetaBinomial>(prior.model_prior);
  return log_beta_fn(bb.a + k, bb.b + rest) - log_beta_fn(bb.a, bb.b);
}

inline double log_model_prior(const ModelIndicator& gamma, const PriorConfig& prior) {
  return log_model_prior(gamma.size(), gamma.p(), prior);
}

/// Number of coefficients of the selected model: q fixed plus p_gamma free.
inline Index coefficient_count(Index q, const ModelIndicator& gamma) {
  return q + static_cast<Index>(gamma.size());
}

/// Diagonal of the prior precision V^{-1}: 1/sigma_alpha^2 on the fixed block, 1/g on the rest.
inline Vector prior_precision(Index q, const ModelIndicator& gamma, const PriorConfig& prior) {
  Vector v(coefficient_count(q, gamma));
  v.head(q).setConstant(1.0 / prior.sigma_alpha_sq);
  v.tail(static_cast<Index>(gamma.size())).setConstant(1.0 / prior.g);
  return v;
}

/// log|V_gamma|.
inline double log_det_prior_cov(Index q, const ModelIndicator& gamma, const PriorConfig& prior) {
  return static_cast<double>(q) * std::log(prior.sigma_alpha_sq) +
         static_cast<double>(gamma.size()) * std::log(prior.g);
}

/// Log density of N(0, sigma_alpha^2 I_q) x N(0, g I_{p_gamma}) at theta.
inline double log_coeff_prior(const Vector& theta, Index q, const ModelIndicator& gamma,
                              const PriorConfig& prior) {
  if (theta.size() != coefficient_count(q, gamma)) {
    throw DataError("coefficient vector length does not match model size");
  }
  const Index d = theta.size();
  const Vector prec = prior_precision(q, gamma, prior);
  return -0.5 * static_cast<double>(d) * kLog2Pi - 0.5 * log_det_prior_cov(q, gamma, prior) -
         0.5 * (theta.array().square() * prec.array()).sum();
}

// ---------------------------------------------------------------------------
// Curvature W = -d^2 log L / d eta d eta^T
// ---------------------------------------------------------------------------

/// Either a diagonal matrix, or (Cox partial likelihood) a diagonal minus a sum
/// of rank-one risk-set terms:
///   W = diag(a) - sum_k c_k u_k u_k^T,  u_k = w restricted to risk set k.
/// Products against design matrices are evaluated from that structure without
/// forming the n x n matrix; dense() materialises it.
class Curvature {
 public:
  static Curvature diagonal(Vector d) {
    Curvature c;
    c.diag_ = std::move(d);
    return c;
  }

  static Curvature risk_set(Vector diag, Vector weights, Vector coef,
                            std::shared_ptr<const RiskSets> risk) {
    Curvature c;
    c.diag_ = std::move(diag);
    c.weights_ = std::move(weights);
    c.coef_ = std::move(coef);
    c.risk_ = std::move(risk);
    return c;
  }

  bool is_diagonal() const { return risk_ == nullptr; }
  Index n() const { return diag_.size(); }
  const Vector& diag_part() const { return diag_; }

  /// W v
  Vector apply(const Vector& v) const {
    Vector out = diag_.cwiseProduct(v);
    if (is_diagonal()) return out;
    const auto& rs = *risk_;
    const std::size_t G = rs.groups();
    std::vector<double> suffix(G);
    double acc = 0.0;
    for (std::size_t k = G; k-- > 0;) {
      for (Index pos = rs.group_begin[k]; pos < rs.group_begin[k + 1]; ++pos) {
        const Index l = rs.order[static_cast<std::size_t>(pos)];
        acc += weights_[l] * v[l];
      }
      suffix[k] = acc;
    }
    std::vector<double> prefix(G);
    double run = 0.0;
    for (std::size_t k = 0; k < G; ++k) {
      run += coef_[static_cast<Index>(k)] * suffix[k];
      prefix[k] = run;
    }
    for (Index l = 0; l < n(); ++l) {
      out[l] -= weights_[l] * prefix[static_cast<std::size_t>(rs.group_of[static_cast<std::size_t>(l)])];
    }
    return out;
  }

  /// A^T W B
  Matrix cross(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& B) const {
    Matrix out = A.transpose() * diag_.asDiagonal() * B;
    if (is_diagonal() || A.cols() == 0 || B.cols() == 0) return out;
    const auto& rs = *risk_;
    Eigen::RowVectorXd sa = Eigen::RowVectorXd::Zero(A.cols());
    Eigen::RowVectorXd sb = Eigen::RowVectorXd::Zero(B.cols());
    for (std::size_t k = rs.groups(); k-- > 0;) {
      for (Index pos = rs.group_begin[k]; pos < rs.group_begin[k + 1]; ++pos) {
        const Index l = rs.order[static_cast<std::size_t>(pos)];
        sa.noalias() += weights_[l] * A.row(l);
        sb.noalias() += weights_[l] * B.row(l);
      }
      const double c = coef_[static_cast<Index>(k)];
      if (c != 0.0) out.noalias() -= c * sa.transpose() * sb;
    }
    return out;
  }

  /// A^T W A
  Matrix gram(const Eigen::Ref<const Matrix>& A) const {
    if (A.cols() == 0) return Matrix(0, 0);
    Matrix out = A.transpose() * diag_.asDiagonal() * A;
    if (is_diagonal()) return out;
    const auto& rs = *risk_;
    Eigen::RowVectorXd sa = Eigen::RowVectorXd::Zero(A.cols());
    for (std::size_t k = rs.groups(); k-- > 0;) {
      for (Index pos = rs.group_begin[k]; pos < rs.group_begin[k + 1]; ++pos) {
        const Index l = rs.order[static_cast<std::size_t>(pos)];
        sa.noalias() += weights_[l] * A.row(l);
      }
      const double c = coef_[static_cast<Index>(k)];
      if (c != 0.0) out.noalias() -= c * sa.transpose() * sa;
    }
    return out;
  }

  /// diag(B^T W B), one entry per column of B.
  Vector column_quad(const Eigen::Ref<const Matrix>& B) const {
    Vector out = (B.array().square().colwise() * diag_.array()).colwise().sum().transpose();
    if (is_diagonal()) return out;
    const auto& rs = *risk_;
    Eigen::RowVectorXd sb = Eigen::RowVectorXd::Zero(B.cols());
    for (std::size_t k = rs.groups(); k-- > 0;) {
      for (Index pos = rs.group_begin[k]; pos < rs.group_begin[k + 1]; ++pos) {
        const Index l = rs.order[static_cast<std::size_t>(pos)];
        sb.noalias() += weights_[l] * B.row(l);
      }
      const double c = coef_[static_cast<Index>(k)];
      if (c != 0.0) out.noalias() -= c * sb.array().square().matrix().transpose();
    }
    return out;
  }

  Matrix dense() const {
    Matrix W = diag_.asDiagonal();
    if (is_diagonal()) return W;
    const auto& rs = *risk_;
    Vector u = Vector::Zero(n());
    for (std::size_t k = rs.groups(); k-- > 0;) {
      for (Index pos = rs.group_begin[k]; pos < rs.group_begin[k + 1]; ++pos) {
        const Index l = rs.order[static_cast<std::size_t>(pos)];
        u[l] = weights_[l];
      }
      const double c = coef_[static_cast<Index>(k)];
      if (c != 0.0) W.noalias() -= c * u * u.transpose();
    }
    return W;
  }

 private:
  Vector diag_;
  Vector weights_;
  Vector coef_;
  std::shared_ptr<const RiskSets> risk_;
};

/// Negated first and second derivatives of the log-likelihood with respect to
/// the linear predictor.
struct GlmDerivatives {
  Vector y_tilde;
  Curvature W;
};

// ---------------------------------------------------------------------------
// Likelihoods as functions of the linear predictor
// ---------------------------------------------------------------------------

namespace detail {

inline double check_shape(const Dataset& data, std::optional<double> shape_k) {
  if (data.kind() == ModelKind::weibull) {
    if (!shape_k) throw DataError("weibull likelihood needs a shape parameter");
    if (!(*shape_k > 0.0)) throw DataError("weibull shape must be positive");
    return *shape_k;
  }
  if (shape_k) throw DataError("shape parameter only applies to the weibull model");
  return 1.0;
}

}  // namespace detail

/// Log-likelihood at linear predictor eta. Cox uses the Breslow convention for ties.
inline double log_likelihood_eta(const Dataset& data, const Vector& eta,
                                 std::optional<double> shape_k = std::nullopt) {
  const double k = detail::check_shape(data, shape_k);
  if (eta.size() != data.n()) throw DataError("linear predictor length does not match n");
  switch (data.kind()) {
    case ModelKind::logistic: {
      double ll = 0.0;
      for (Index i = 0; i < eta.size(); ++i) {
        const double e = eta[i];
        ll += data.y()[i] * e - (std::max(e, 0.0) + std::log1p(std::exp(-std::abs(e))));
      }
      return ll;
    }
    case ModelKind::weibull: {
      const Vector& d = data.event();
      const Vector& lt = data.log_time();
      double ll = 0.0;
      for (Index i = 0; i < eta.size(); ++i) {
        const double z = k * (lt[i] + eta[i]);
        ll += d[i] * (std::log(k) + k * eta[i] + (k - 1.0) * lt[i]) - std::exp(z);
      }
      return ll;
    }
    case ModelKind::cox_partial: {
      const auto& rs = *data.risk_sets();
      const double shift = eta.maxCoeff();
      double ll = 0.0;
      double risk_sum = 0.0;
      for (std::size_t g = rs.groups(); g-- > 0;) {
        double event_eta = 0.0;
        for (Index pos = rs.group_begin[g]; pos < rs.group_begin[g + 1]; ++pos) {
          const Index l = rs.order[static_cast<std::size_t>(pos)];
          risk_sum += std::exp(eta[l] - shift);
          if (data.event()[l] != 0.0) event_eta += eta[l];
        }
        if (rs.events[g] > 0.0) ll += event_eta - rs.events[g] * (std::log(risk_sum) + shift);
      }
      return ll;
    }
  }
  return 0.0;
}

inline GlmDerivatives eta_derivatives(const Dataset& data, const Vector& eta,
                                      std::optional<double> shape_k = std::nullopt) {
  const double k = detail::check_shape(data, shape_k);
  if (eta.size() != data.n()) throw DataError("linear predictor length does not match n");
  const Index n = eta.size();
  switch (data.kind()) {
    case ModelKind::logistic: {
      Vector yt(n), w(n);
      for (Index i = 0; i < n; ++i) {
        const double mu = inv_logit(eta[i]);
        yt[i] = mu - data.y()[i];
        w[i] = mu * (1.0 - mu);
      }
      return {std::move(yt), Curvature::diagonal(std::move(w))};
    }
    case ModelKind::weibull: {
      Vector yt(n), w(n);
      for (Index i = 0; i < n; ++i) {
        const double cum = std::exp(k * (data.log_time()[i] + eta[i]));
        yt[i] = k * cum - k * data.event()[i];
        w[i] = k * k * cum;
      }
      return {std::move(yt), Curvature::diagonal(std::move(w))};
    }
    case ModelKind::cox_partial: {
      const auto& risk = data.risk_sets();
      const auto& rs = *risk;
      const std::size_t G = rs.groups();
      const double shift = eta.maxCoeff();
      Vector w = (eta.array() - shift).exp();
      Vector S(static_cast<Index>(G));
      double acc = 0.0;
      for (std::size_t g = G; g-- > 0;) {
        for (Index pos = rs.group_begin[g]; pos < rs.group_begin[g + 1]; ++pos) {
          acc += w[rs.order[static_cast<std::size_t>(pos)]];
        }
        S[static_cast<Index>(g)] = acc;
      }
      // cumulative hazard increments m_g / S_g, summed over groups at or before each time
      Vector cumhaz(static_cast<Index>(G));
      Vector coef(static_cast<Index>(G));
      double run = 0.0;
      for (std::size_t g = 0; g < G; ++g) {
        const double Sg = S[static_cast<Index>(g)];
        run += rs.events[g] / Sg;
        cumhaz[static_cast<Index>(g)] = run;
        coef[static_cast<Index>(g)] = rs.events[g] / (Sg * Sg);
      }
      Vector yt(n), a(n);
      for (Index l = 0; l < n; ++l) {
        const double c = cumhaz[rs.group_of[static_cast<std::size_t>(l)]];
        a[l] = w[l] * c;
        yt[l] = a[l] - data.event()[l];
      }
      return {std::move(yt), Curvature::risk_set(std::move(a), std::move(w), std::move(coef), risk)};
    }
  }
  throw DataError("unknown model kind");
}

// ---------------------------------------------------------------------------
// Model view used by the estimators
// ---------------------------------------------------------------------------

/// Anything with a fixed/free design and a likelihood of the linear predictor.
template <class M>
concept PredictorModel = requires(const M& m, const Vector& eta) {
  { m.n() } -> std::convertible_to<Index>;
  { m.fixed_design() } -> std::convertible_to<const Matrix&>;
  { m.free_design() } -> std::convertible_to<const Matrix&>;
  { m.log_likelihood(eta) } -> std::convertible_to<double>;
  { m.derivatives(eta) } -> std::same_as<GlmDerivatives>;
};

/// A Dataset bound to a Weibull shape (ignored for the other kinds).
class GlmModel {
 public:
  explicit GlmModel(const Dataset& data, std::optional<double> shape_k = std::nullopt)
      : data_(&data) {
    if (data.kind() == ModelKind::weibull) {
      shape_ = detail::check_shape(data, shape_k);
      has_shape_ = true;
    }
  }

  const Dataset& data() const { return *data_; }
  std::optional<double> shape() const { return has_shape_ ? std::optional<double>(shape_) : std::nullopt; }
  Index n() const { return data_->n(); }
  const Matrix& fixed_design() const { return data_->Z(); }
  const Matrix& free_design() const { return data_->X(); }
  double log_likelihood(const Vector& eta) const { return log_likelihood_eta(*data_, eta, shape()); }
  GlmDerivatives derivatives(const Vector& eta) const { return eta_derivatives(*data_, eta, shape()); }

 private:
  const Dataset* data_;
  double shape_ = 1.0;  // plain members: gcc warns spuriously on a copied optional
  bool has_shape_ = false;
};

/// J_gamma = (Z, X_gamma).
template <PredictorModel M>
Matrix design_matrix(const M& model, const ModelIndicator& gamma) {
  const Matrix& Z = model.fixed_design();
  const Matrix& X = model.free_design();
  Matrix J(model.n(), Z.cols() + static_cast<Index>(gamma.size()));
  if (Z.cols() > 0) J.leftCols(Z.cols()) = Z;
  Index c = Z.cols();
  for (Index j : gamma.included()) J.col(c++) = X.col(j);
  return J;
}

/// Log-likelihood of model gamma at coefficients theta = (alpha, beta_gamma).
inline double log_likelihood(const Dataset& data, const ModelIndicator& gamma, const Vector& theta,
                             std::optional<double> shape_k = std::nullopt) {
  if (theta.size() != coefficient_count(data.q(), gamma)) {
    throw DataError("coefficient vector length does not match model size");
  }
  GlmModel model(data, shape_k);
  const Vector eta = design_matrix(model, gamma) * theta;
  return log_likelihood_eta(data, eta, shape_k);
}

}  // namespace parni
