#pragma once

// Add-delete-swap proposal used as the baseline sampler.

#include "parni/model_core.hpp"

namespace parni {

struct AdsProposal {
  ModelIndicator gamma_prime;
  double log_fwd = 0.0;
  double log_rev = 0.0;
};

namespace detail {

// Number of available move classes at a model of this size.
inline double ads_move_classes(std::size_t size, std::size_t p) {
  return (size == 0 || size == p) ? 1.0 : 3.0;
}

}  // namespace detail

/// Exact log probability of the add-delete-swap kernel proposing `to` from `from`
/// (-inf when `to` is not reachable in one move).
inline double ads_log_proposal(const ModelIndicator& from, const ModelIndicator& to) {
  const std::size_t p = from.p();
  const std::size_t k = from.size();
  const double classes = detail::ads_move_classes(k, p);
  const std::size_t dist = from.hamming(to);
  if (dist == 1) {
    if (to.size() > k) return -std::log(classes) - std::log(static_cast<double>(p - k));
    return -std::log(classes) - std::log(static_cast<double>(k));
  }
  if (dist == 2 && to.size() == k && k > 0 && k < p) {
    return -std::log(3.0) - std::log(static_cast<double>(k)) - std::log(static_cast<double>(p - k));
  }
  return kNegInf;
}

/// Uniform choice among add / delete / swap (only the feasible classes at the
/// empty and full models), then a uniform coordinate choice within the class.
inline AdsProposal ads_propose(const ModelIndicator& gamma, Rng& rng) {
  const std::size_t p = gamma.p();
  if (p < 2) throw ConfigError("add-delete-swap needs at least two covariates");
  const std::size_t k = gamma.size();
  std::vector<Index> excluded;
  excluded.reserve(p - k);
  for (std::size_t j = 0; j < p; ++j) {
    if (!gamma[j]) excluded.push_back(static_cast<Index>(j));
  }
  const auto pick = [&rng](std::size_t m) {
    return std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
  };
  int move = 0;  // 0 add, 1 delete, 2 swap
  if (k == 0) {
    move = 0;
  } else if (k == p) {
    move = 1;
  } else {
    move = static_cast<int>(pick(3));
  }
  AdsProposal out;
  out.gamma_prime = gamma;
  if (move == 0) {
    out.gamma_prime.set(static_cast<std::size_t>(excluded[pick(excluded.size())]), true);
  } else if (move == 1) {
    out.gamma_prime.set(static_cast<std::size_t>(gamma.included()[pick(k)]), false);
  } else {
    const Index drop = gamma.included()[pick(k)];
    const Index add = excluded[pick(excluded.size())];
    out.gamma_prime.set(static_cast<std::size_t>(drop), false);
    out.gamma_prime.set(static_cast<std::size_t>(add), true);
  }
  out.log_fwd = ads_log_proposal(gamma, out.gamma_prime);
  out.log_rev = ads_log_proposal(out.gamma_prime, gamma);
  return out;
}

}  // namespace parni
