#pragma once

// Adaptive random-walk Metropolis updates for the slab scale g (half-Cauchy on
// sqrt(g), walk on log g) and the Weibull shape k (normal prior on log k, walk
// on log k). The proposal variance adapts on the log scale with step i^{-0.7}.

#include "parni/marginal_likelihood.hpp"

#include <optional>

namespace parni {

struct AdaptiveRwState {
  double log_variance = 0.0;
  double target_accept = 0.234;
  std::size_t iteration = 0;

  double variance() const { return std::exp(log_variance); }
};

struct HyperStep {
  double value = 0.0;
  AdaptiveRwState rw;
  double accept_prob = 0.0;
  bool accepted = false;
  std::optional<MarglikResult> marglik;  // estimate at the new value when accepted
};

/// Log density of nu = log g when sqrt(g) is standard half-Cauchy, written in g:
/// (1/pi) sqrt(g) / (1 + g).
inline double log_density_log_g(double g) {
  return -std::log(std::numbers::pi) + 0.5 * std::log(g) - std::log1p(g);
}

/// Log density of s = log k under N(0, sigma_k^2).
inline double log_density_log_shape(double s, double sigma_k_sq) {
  return -0.5 * (kLog2Pi + std::log(sigma_k_sq)) - 0.5 * s * s / sigma_k_sq;
}

/// One random-walk step on a log-scale parameter x = log(value), with the
/// standard normal increment z and the uniform u supplied by the caller.
/// `marglik_fn(value)` returns the estimate at a proposed value and may throw
/// EstimatorFailure, which rejects the move.
template <class MarglikFn, class LogPriorFn>
HyperStep log_scale_rw_step(double value, double current_log_marglik, const AdaptiveRwState& rw,
                            double z, double u, MarglikFn&& marglik_fn, LogPriorFn&& log_prior_of_log) {
  HyperStep out;
  out.value = value;
  out.rw = rw;
  const double x = std::log(value);
  const double x_new = x + std::sqrt(rw.variance()) * z;
  double log_alpha = kNegInf;
  std::optional<MarglikResult> cand;
  if (x_new == x) {
    log_alpha = 0.0;
  } else {
    try {
      cand = marglik_fn(std::exp(x_new));
      log_alpha = (cand->log_value + log_prior_of_log(x_new)) -
                  (current_log_marglik + log_prior_of_log(x));
    } catch (const EstimatorFailure&) {
      log_alpha = kNegInf;
    }
  }
  if (std::isnan(log_alpha)) log_alpha = kNegInf;
  out.accept_prob = log_alpha >= 0.0 ? 1.0 : std::exp(log_alpha);
  if (std::log(u) < log_alpha) {
    out.accepted = true;
    out.value = std::exp(x_new);
    out.marglik = std::move(cand);
  }
  out.rw.iteration += 1;
  out.rw.log_variance +=
      std::pow(static_cast<double>(out.rw.iteration), -0.7) * (out.accept_prob - rw.target_accept);
  return out;
}

/// Metropolis update of g on nu = log g targeting p(y | gamma, g) p_nu(g).
template <class MarglikFn>
HyperStep update_g(double g, double current_log_marglik, const AdaptiveRwState& rw,
                   MarglikFn&& marglik_fn, Rng& rng) {
  const double z = standard_normal(rng);
  const double u = uniform01(rng);
  return log_scale_rw_step(g, current_log_marglik, rw, z, u, marglik_fn,
                           [](double nu) { return log_density_log_g(std::exp(nu)); });
}

/// Metropolis update of the Weibull shape on s = log k targeting p(y | gamma, k) p_s(s).
template <class MarglikFn>
HyperStep update_weibull_shape(double k, double current_log_marglik, double sigma_k_sq,
                               const AdaptiveRwState& rw, MarglikFn&& marglik_fn, Rng& rng) {
  const double z = standard_normal(rng);
  const double u = uniform01(rng);
  return log_scale_rw_step(k, current_log_marglik, rw, z, u, marglik_fn,
                           [sigma_k_sq](double s) { return log_density_log_shape(s, sigma_k_sq); });
}

}  // namespace parni
