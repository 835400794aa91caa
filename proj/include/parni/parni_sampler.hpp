#pragma once

// Pointwise adaptive random-neighbourhood informed proposal: neighbourhood
// masks, the sequential two-model informed steps with their reverse-path
// probabilities, and the adaptation of the mask and jump parameters.

#include "parni/model_core.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace parni {

/// k_j = 1 marks coordinate j as free to change; `active` lists those
/// coordinates in the (random) order they are visited.
struct NeighbourhoodMask {
  std::vector<std::uint8_t> k;
  std::vector<Index> active;

  std::size_t size() const { return active.size(); }
};

struct TuningState {
  Vector A;
  Vector D;
  double zeta = 0.5;
  Vector pi_warm;
  Vector pi_ergodic;
  Vector pi_hat;
  Vector eta_hat;
  std::size_t iter = 0;
  std::size_t burn_in = 0;
  double epsilon = 0.01;
  double target_accept = 0.234;

  Index p() const { return A.size(); }
};

/// Weight on the warm-start estimate at iteration l: above 1/2 during burn-in,
/// decaying as (l - N_b)^{-1/2} / 2 afterwards.
inline double warm_start_weight(std::size_t l, std::size_t burn_in) {
  if (l <= burn_in) {
    return 1.0 - 0.5 / std::sqrt(static_cast<double>(burn_in - l + 1));
  }
  return 0.5 / std::sqrt(static_cast<double>(l - burn_in));
}

namespace detail {

inline void refresh_mask_probs(TuningState& t) {
  const double lo = t.epsilon;
  const double hi = 1.0 - t.epsilon;
  for (Index j = 0; j < t.p(); ++j) {
    const double pj = std::clamp(t.pi_hat[j], lo, hi);
    t.pi_hat[j] = pj;
    t.A[j] = std::clamp(std::min(1.0, pj / (1.0 - pj)), lo, hi);
    t.D[j] = std::clamp(std::min(1.0, (1.0 - pj) / pj), lo, hi);
  }
}

}  // namespace detail

/// Tuning at iteration zero: the composite estimate equals the warm start.
inline TuningState initial_tuning(const Vector& pi_warm, Index n, std::size_t burn_in,
                                  double epsilon, double zeta = 0.5, double target_accept = 0.234) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("clamp epsilon must lie in (0, 1/2)");
  TuningState t;
  const Index p = pi_warm.size();
  t.A.resize(p);
  t.D.resize(p);
  t.pi_warm = pi_warm;
  t.pi_ergodic = Vector::Zero(p);
  t.pi_hat = pi_warm;
  t.eta_hat = Vector::Zero(n);
  t.burn_in = burn_in;
  t.epsilon = epsilon;
  t.zeta = std::clamp(zeta, epsilon, 1.0 - epsilon);
  t.target_accept = target_accept;
  detail::refresh_mask_probs(t);
  return t;
}

/// P(k_j = 1 | gamma_j): A_j for an excluded coordinate, D_j for an included one.
inline double mask_inclusion_prob(const TuningState& t, std::size_t j, bool included) {
  return included ? t.D[static_cast<Index>(j)] : t.A[static_cast<Index>(j)];
}

inline NeighbourhoodMask sample_mask(const ModelIndicator& gamma, const TuningState& tuning, Rng& rng) {
  NeighbourhoodMask m;
  const std::size_t p = gamma.p();
  m.k.assign(p, 0);
  for (std::size_t j = 0; j < p; ++j) {
    if (uniform01(rng) < mask_inclusion_prob(tuning, j, gamma[j])) {
      m.k[j] = 1;
      m.active.push_back(static_cast<Index>(j));
    }
  }
  std::shuffle(m.active.begin(), m.active.end(), rng);
  return m;
}

inline double log_mask_prob(const std::vector<std::uint8_t>& k, const ModelIndicator& gamma,
                            const TuningState& tuning) {
  if (k.size() != gamma.p()) throw DataError("mask length does not match model length");
  double lp = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    const double pr = mask_inclusion_prob(tuning, j, gamma[j]);
    lp += k[j] ? std::log(pr) : std::log1p(-pr);
  }
  return lp;
}

inline double log_mask_prob(const NeighbourhoodMask& k, const ModelIndicator& gamma,
                            const TuningState& tuning) {
  return log_mask_prob(k.k, gamma, tuning);
}

/// Hastings balancing function g(x) = min(1, x), on the log scale.
inline double log_balancing(double log_x) {
  if (std::isnan(log_x)) return kNegInf;
  return std::min(0.0, log_x);
}

namespace detail {

// log(w / (1 + w)) given log w
inline double log_flip_prob(double log_w) {
  if (log_w == kNegInf) return kNegInf;
  return log_w > 0.0 ? -std::log1p(std::exp(-log_w)) : log_w - std::log1p(std::exp(log_w));
}

// log(1 / (1 + w)) given log w
inline double log_stay_prob(double log_w) {
  if (log_w == kNegInf) return 0.0;
  return log_w > 0.0 ? -log_w - std::log1p(std::exp(-log_w)) : -std::log1p(std::exp(log_w));
}

}  // namespace detail

struct PointwiseProposal {
  ModelIndicator gamma_prime;
  double log_fwd = 0.0;
  double log_rev = 0.0;
  std::size_t flips = 0;
};

/// Walks the active coordinates of the mask; at each one chooses between the
/// current intermediate model and its single-coordinate flip with informed
/// weights g(pi(gamma*) p(k|gamma*) / pi(gamma) p(k|gamma)) (zeta/(1-zeta))^{d_H}.
/// The reverse path visits the same coordinates backwards; each of its steps
/// uses the same two models, so its probability is accumulated in place.
/// `score(gamma)` returns the proposal-side log posterior (may be -inf).
template <class ScoreFn>
PointwiseProposal pointwise_propose(const ModelIndicator& gamma, const NeighbourhoodMask& mask,
                                    const TuningState& tuning, ScoreFn&& score, Rng& rng) {
  PointwiseProposal out;
  out.gamma_prime = gamma;
  if (mask.active.empty()) return out;
  const double log_jump_odds = std::log(tuning.zeta) - std::log1p(-tuning.zeta);
  double s_cur = score(out.gamma_prime);
  for (Index j : mask.active) {
    const auto uj = static_cast<std::size_t>(j);
    const bool on = out.gamma_prime[uj];
    ModelIndicator cand = out.gamma_prime.flipped(uj);
    const double s_cand = score(cand);
    const double log_mask_ratio = std::log(mask_inclusion_prob(tuning, uj, !on)) -
                                  std::log(mask_inclusion_prob(tuning, uj, on));
    double log_x = s_cand - s_cur + log_mask_ratio;
    if (s_cand == kNegInf) log_x = kNegInf;
    const double log_w_fwd = log_balancing(log_x) + log_jump_odds;
    const double log_w_rev = log_balancing(-log_x) + log_jump_odds;
    const double lf = detail::log_flip_prob(log_w_fwd);
    if (std::log(uniform01(rng)) < lf) {
      out.log_fwd += lf;
      out.log_rev += detail::log_flip_prob(log_w_rev);
      out.gamma_prime = std::move(cand);
      s_cur = s_cand;
      ++out.flips;
    } else {
      const double ls = detail::log_stay_prob(log_w_fwd);
      out.log_fwd += ls;
      out.log_rev += ls;
    }
  }
  return out;
}

/// One adaptation step after iteration L = tuning.iter + 1: ergodic inclusion
/// frequencies, composite estimate, mask probabilities, jump probability
/// (Robbins-Monro on logit zeta towards the target acceptance rate) and the
/// running mean of fitted linear predictors.
inline TuningState update_tuning(TuningState tuning, const ModelIndicator& accepted_gamma,
                                 double acceptance_prob, const std::optional<Vector>& eta_opt) {
  const std::size_t L = ++tuning.iter;
  const double inv_l = 1.0 / static_cast<double>(L);
  for (Index j = 0; j < tuning.p(); ++j) {
    const double ind = accepted_gamma[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    tuning.pi_ergodic[j] += (ind - tuning.pi_ergodic[j]) * inv_l;
  }
  const double phi = warm_start_weight(L, tuning.burn_in);
  tuning.pi_hat = phi * tuning.pi_warm + (1.0 - phi) * tuning.pi_ergodic;
  detail::refresh_mask_probs(tuning);

  const double step = std::pow(static_cast<double>(L), -0.7);
  const double lz = logit(tuning.zeta) + step * (acceptance_prob - tuning.target_accept);
  tuning.zeta = std::clamp(inv_logit(lz), tuning.epsilon, 1.0 - tuning.epsilon);

  if (eta_opt && eta_opt->size() == tuning.eta_hat.size()) {
    tuning.eta_hat += (*eta_opt - tuning.eta_hat) * inv_l;
  }
  return tuning;
}

}  // namespace parni
