#pragma once

// Single-chain driver for the PARNI and add-delete-swap samplers: estimator
// dispatch, the Metropolis-Hastings step with pseudo-marginal bookkeeping,
// hyper-parameter updates, adaptation and output recording.

#include "parni/ads_sampler.hpp"
#include "parni/hyper_updates.hpp"
#include "parni/marginal_likelihood.hpp"
#include "parni/parni_sampler.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <exception>
#include <thread>
#include <unordered_map>

namespace parni {

enum class SamplerKind { parni, ads };

inline std::string to_string(SamplerKind s) { return s == SamplerKind::parni ? "parni" : "ads"; }

inline SamplerKind parse_sampler(const std::string& s) {
  if (s == "parni" || s == "PARNI") return SamplerKind::parni;
  if (s == "ads" || s == "ADS") return SamplerKind::ads;
  throw ConfigError("unknown sampler '" + s + "'");
}

struct ChainConfig {
  SamplerKind sampler = SamplerKind::parni;
  Method proposal = Method::adaptive_ala;
  Method acceptance = Method::cpm;
  std::size_t iterations = 1000;
  std::optional<std::size_t> burn_in;  // default: iterations / 10 (0 in budget mode)
  std::size_t thin = 1;
  std::optional<double> budget_seconds;
  std::size_t thin_target = 10000;  // recorded samples kept in budget mode
  std::optional<double> epsilon;    // default 0.1 / p
  double zeta_init = 0.5;
  double target_accept = 0.234;
  Index cpm_samples = 64;
  double cpm_rho = 0.99;
  std::optional<ModelIndicator> initial;
  double shape_init = 1.0;
  double g_log_variance_init = 0.0;
  double shape_log_variance_init = -4.0;
  bool adapt = true;

  std::size_t effective_burn_in() const {
    if (burn_in) return *burn_in;
    return budget_seconds ? 0 : iterations / 10;
  }

  void validate(const Dataset& data) const {
    if (acceptance != Method::la && acceptance != Method::cpm && acceptance != Method::da_conditional) {
      throw ConfigError("acceptance estimator must be da, la or cpm");
    }
    if (proposal == Method::cpm) throw ConfigError("cpm cannot be used as the proposal estimator");
    if ((acceptance == Method::da_conditional || proposal == Method::da_conditional) &&
        data.kind() != ModelKind::logistic) {
      throw ConfigError("data augmentation is only available for logistic regression");
    }
    if (sampler == SamplerKind::ads && data.p() < 2) throw ConfigError("add-delete-swap needs p >= 2");
    if (thin < 1) throw ConfigError("thinning must be at least 1");
    if (thin_target < 1) throw ConfigError("thin target must be at least 1");
    if (budget_seconds && !(*budget_seconds > 0.0)) throw ConfigError("budget must be positive");
    if (!budget_seconds && iterations > 0 && effective_burn_in() >= iterations) {
      throw ConfigError("burn-in must be shorter than the run");
    }
    if (epsilon && !(*epsilon > 0.0 && *epsilon < 0.5)) throw ConfigError("epsilon must lie in (0, 1/2)");
    if (!(zeta_init > 0.0 && zeta_init < 1.0)) throw ConfigError("initial zeta must lie in (0,1)");
    if (cpm_samples < 1) throw ConfigError("CPM needs at least one importance sample");
    if (!(cpm_rho >= 0.0 && cpm_rho < 1.0)) throw ConfigError("CPM correlation must lie in [0,1)");
    if (!(shape_init > 0.0)) throw ConfigError("initial Weibull shape must be positive");
    if (initial && static_cast<Index>(initial->p()) != data.p()) {
      throw ConfigError("initial model length does not match p");
    }
  }
};

/// Label of the distribution a chain targets: deterministic LA acceptance
/// targets the Laplace-approximated posterior.
inline std::string target_label(Method acceptance) {
  return acceptance == Method::la ? "pi_LA" : "pi";
}

struct ChainState {
  ModelIndicator gamma;
  double log_post = 0.0;
  MarglikResult marglik;
  Vector omega;
  std::optional<CpmAuxiliary> aux;
  double g = 1.0;
  std::optional<double> shape_k;
};

struct ChainOutput {
  // recorded (thinned) iterations; iteration 0 is the initial state
  std::vector<std::size_t> iteration;
  std::vector<ModelIndicator> models;
  std::vector<double> log_post;
  std::vector<std::uint8_t> accepted;
  std::vector<double> g;
  std::vector<double> shape;
  // every iteration
  std::vector<double> iter_seconds;

  Vector pip;
  std::size_t iterations = 0;
  std::size_t burn_in = 0;
  std::size_t accepted_moves = 0;
  std::size_t estimator_failures = 0;
  double total_seconds = 0.0;
  std::string target;
  std::uint64_t seed = 0;

  double acceptance_rate() const {
    return iterations == 0 ? 0.0 : static_cast<double>(accepted_moves) / static_cast<double>(iterations);
  }
};

class Chain {
 public:
  Chain(const Dataset& data, const PriorConfig& prior, ChainConfig cfg, Rng rng)
      : data_(&data), prior_(prior), cfg_(std::move(cfg)), rng_(std::move(rng)) {
    prior_.validate();
    cfg_.validate(data);
    const auto p = static_cast<std::size_t>(data.p());
    state_.gamma = cfg_.initial ? *cfg_.initial : ModelIndicator(p);
    state_.g = prior_.g;
    if (data.kind() == ModelKind::weibull) state_.shape_k = cfg_.shape_init;
    g_rw_.log_variance = cfg_.g_log_variance_init;
    g_rw_.target_accept = cfg_.target_accept;
    k_rw_.log_variance = cfg_.shape_log_variance_init;
    k_rw_.target_accept = cfg_.target_accept;

    if (cfg_.acceptance == Method::cpm) {
      state_.aux = CpmAuxiliary::draw(cfg_.cpm_samples, data.q() + data.p(), cfg_.cpm_rho, rng_);
    }
    if (cfg_.acceptance == Method::da_conditional || cfg_.proposal == Method::da_conditional) {
      state_.omega = Vector::Constant(data.n(), 0.25);
      refresh_omega();
    }
    try {
      state_.marglik = evaluate_acceptance(state_.gamma, state_.aux ? &*state_.aux : nullptr, prior_,
                                           state_.shape_k);
      state_.log_post = state_.marglik.log_value + log_model_prior(state_.gamma, prior_);
      if (cfg_.sampler == SamplerKind::parni) {
        const Vector warm = warm_start_pips(model(), state_.gamma, prior_);
        const double eps = cfg_.epsilon.value_or(0.1 / static_cast<double>(p));
        tuning_ = initial_tuning(warm, data.n(), cfg_.effective_burn_in(), eps, cfg_.zeta_init,
                                 cfg_.target_accept);
      }
    } catch (const EstimatorFailure& e) {
      throw DataError(std::string("initial model could not be evaluated: ") + e.what());
    }
  }

  const ChainState& state() const { return state_; }
  const TuningState& tuning() const { return tuning_; }
  const PriorConfig& prior() const { return prior_; }
  std::size_t iteration() const { return iter_; }
  std::size_t estimator_failures() const { return failures_; }
  double last_accept_prob() const { return last_accept_prob_; }
  bool last_accepted() const { return last_accepted_; }

  /// One full iteration: model move, g, Weibull shape, omega, adaptation.
  void step() {
    ++iter_;
    GlmModel m = model();
    ModelIndicator proposed;
    double log_q_ratio = 0.0;
    score_cache_.clear();
    la_cache_.clear();
    if (cfg_.sampler == SamplerKind::parni) {
      if (cfg_.proposal == Method::adaptive_ala) deriv_hat_ = m.derivatives(tuning_.eta_hat);
      const NeighbourhoodMask mask = sample_mask(state_.gamma, tuning_, rng_);
      auto score = [this, &m](const ModelIndicator& g) { return proposal_score(m, g); };
      PointwiseProposal prop = pointwise_propose(state_.gamma, mask, tuning_, score, rng_);
      proposed = std::move(prop.gamma_prime);
      log_q_ratio = prop.log_rev - prop.log_fwd + log_mask_prob(mask, proposed, tuning_) -
                    log_mask_prob(mask, state_.gamma, tuning_);
    } else {
      AdsProposal prop = ads_propose(state_.gamma, rng_);
      proposed = std::move(prop.gamma_prime);
      log_q_ratio = prop.log_rev - prop.log_fwd;
    }

    last_accepted_ = false;
    if (proposed == state_.gamma) {
      last_accept_prob_ = 1.0;
    } else {
      std::optional<CpmAuxiliary> new_aux;
      if (state_.aux) new_aux = cpm_refresh(*state_.aux, rng_);
      double log_alpha = kNegInf;
      MarglikResult cand;
      try {
        cand = acceptance_estimate(m, proposed, new_aux ? &*new_aux : nullptr);
        const double lp = cand.log_value + log_model_prior(proposed, prior_);
        log_alpha = lp - state_.log_post + log_q_ratio;
      } catch (const EstimatorFailure&) {
        ++failures_;
      }
      if (std::isnan(log_alpha)) log_alpha = kNegInf;
      last_accept_prob_ = log_alpha >= 0.0 ? 1.0 : std::exp(log_alpha);
      if (std::log(uniform01(rng_)) < log_alpha) {
        last_accepted_ = true;
        state_.gamma = std::move(proposed);
        state_.marglik = std::move(cand);
        state_.log_post = state_.marglik.log_value + log_model_prior(state_.gamma, prior_);
        if (new_aux) state_.aux = std::move(new_aux);
      }
    }

    if (prior_.hierarchical_g) update_slab_scale();
    if (state_.shape_k) update_shape();
    if (state_.omega.size() > 0) {
      refresh_omega();
      if (cfg_.acceptance == Method::da_conditional) {
        state_.marglik = da_conditional_logmarglik(*data_, design_matrix(model(), state_.gamma),
                                                   state_.gamma, prior_, state_.omega);
        state_.log_post = state_.marglik.log_value + log_model_prior(state_.gamma, prior_);
      }
    }

    if (cfg_.sampler == SamplerKind::parni && cfg_.adapt) {
      tuning_ = update_tuning(std::move(tuning_), state_.gamma, last_accept_prob_, state_.marglik.eta_hat);
    }
  }

  GlmModel model() const { return GlmModel(*data_, state_.shape_k); }

 private:
  MarglikResult evaluate_acceptance(const ModelIndicator& gamma, const CpmAuxiliary* aux,
                                    const PriorConfig& prior, std::optional<double> shape) const {
    GlmModel m(*data_, shape);
    const Matrix J = design_matrix(m, gamma);
    const Vector zero = Vector::Zero(J.cols());
    switch (cfg_.acceptance) {
      case Method::la: return log_marglik_la(m, J, gamma, prior, zero);
      case Method::cpm: return log_marglik_cpm(m, J, gamma, prior, *aux, zero);
      case Method::da_conditional: return da_conditional_logmarglik(*data_, J, gamma, prior, state_.omega);
      default: break;
    }
    throw ConfigError("unsupported acceptance estimator");
  }

  MarglikResult acceptance_estimate(const GlmModel& m, const ModelIndicator& gamma, const CpmAuxiliary* aux) {
    if (cfg_.acceptance == Method::la) {
      auto it = la_cache_.find(gamma);
      if (it != la_cache_.end()) return it->second;
    }
    return evaluate_acceptance(gamma, aux, prior_, m.shape());
  }

  double proposal_score(const GlmModel& m, const ModelIndicator& gamma) {
    auto it = score_cache_.find(gamma);
    if (it != score_cache_.end()) return it->second;
    double s = kNegInf;
    try {
      const Matrix J = design_matrix(m, gamma);
      double lm = 0.0;
      switch (cfg_.proposal) {
        case Method::adaptive_ala:
          lm = log_marglik_adaptive_ala(m, J, gamma, prior_, tuning_.eta_hat, deriv_hat_).log_value;
          break;
        case Method::ala:
          lm = log_marglik_ala(m, J, gamma, prior_, Vector(Vector::Zero(J.cols()))).log_value;
          break;
        case Method::la: {
          MarglikResult r = log_marglik_la(m, J, gamma, prior_, Vector(Vector::Zero(J.cols())));
          lm = r.log_value;
          la_cache_.emplace(gamma, std::move(r));
          break;
        }
        case Method::da_conditional:
          lm = da_conditional_logmarglik(*data_, J, gamma, prior_, state_.omega).log_value;
          break;
        default: throw ConfigError("unsupported proposal estimator");
      }
      s = lm + log_model_prior(gamma, prior_);
      if (std::isnan(s)) s = kNegInf;
    } catch (const EstimatorFailure&) {
      ++failures_;
    }
    score_cache_.emplace(gamma, s);
    return s;
  }

  void update_slab_scale() {
    const CpmAuxiliary* aux = state_.aux ? &*state_.aux : nullptr;
    auto fn = [&](double g_new) {
      return evaluate_acceptance(state_.gamma, aux, prior_.with_g(g_new), state_.shape_k);
    };
    HyperStep s = update_g(prior_.g, state_.marglik.log_value, g_rw_, fn, rng_);
    g_rw_ = s.rw;
    if (s.accepted) {
      prior_.g = s.value;
      state_.g = s.value;
      state_.marglik = std::move(*s.marglik);
      state_.log_post = state_.marglik.log_value + log_model_prior(state_.gamma, prior_);
    }
  }

  void update_shape() {
    const CpmAuxiliary* aux = state_.aux ? &*state_.aux : nullptr;
    auto fn = [&](double k_new) { return evaluate_acceptance(state_.gamma, aux, prior_, k_new); };
    HyperStep s = update_weibull_shape(*state_.shape_k, state_.marglik.log_value, prior_.sigma_k_sq, k_rw_,
                                       fn, rng_);
    k_rw_ = s.rw;
    if (s.accepted) {
      state_.shape_k = s.value;
      state_.marglik = std::move(*s.marglik);
      state_.log_post = state_.marglik.log_value + log_model_prior(state_.gamma, prior_);
    }
  }

  void refresh_omega() {
    GlmModel m(*data_);
    state_.omega = da_gibbs_sweep(*data_, design_matrix(m, state_.gamma), state_.gamma, prior_, state_.omega,
                                  rng_)
                       .omega;
  }

  const Dataset* data_;
  PriorConfig prior_;
  ChainConfig cfg_;
  Rng rng_;
  ChainState state_;
  TuningState tuning_;
  AdaptiveRwState g_rw_;
  AdaptiveRwState k_rw_;
  GlmDerivatives deriv_hat_;
  std::unordered_map<ModelIndicator, double, ModelIndicatorHash> score_cache_;
  std::unordered_map<ModelIndicator, MarglikResult, ModelIndicatorHash> la_cache_;
  std::size_t iter_ = 0;
  std::size_t failures_ = 0;
  double last_accept_prob_ = 1.0;
  bool last_accepted_ = false;
};

namespace detail {

/// Keeps at most 2 * target records by doubling the recording stride.
class ThinnedRecorder {
 public:
  ThinnedRecorder(std::size_t stride, std::optional<std::size_t> adaptive_target)
      : stride_(stride), target_(adaptive_target) {}

  bool wants(std::size_t iter) const { return iter % stride_ == 0; }

  void after_record(ChainOutput& out) {
    if (!target_ || out.iteration.size() <= 2 * *target_) return;
    const std::size_t next = stride_ * 2;
    std::size_t w = 0;
    for (std::size_t r = 0; r < out.iteration.size(); ++r) {
      if (out.iteration[r] % next != 0) continue;
      move_record(out, r, w++);
    }
    truncate(out, w);
    stride_ = next;
  }

  /// Evenly subsample down to the target count.
  void finish(ChainOutput& out) const {
    if (!target_ || out.iteration.size() <= *target_) return;
    const std::size_t count = out.iteration.size();
    for (std::size_t w = 0; w < *target_; ++w) {
      move_record(out, (w * count) / *target_, w);
    }
    truncate(out, *target_);
  }

 private:
  static void move_record(ChainOutput& out, std::size_t from, std::size_t to) {
    if (from == to) return;
    out.iteration[to] = out.iteration[from];
    out.models[to] = std::move(out.models[from]);
    out.log_post[to] = out.log_post[from];
    out.accepted[to] = out.accepted[from];
    out.g[to] = out.g[from];
    out.shape[to] = out.shape[from];
  }

  static void truncate(ChainOutput& out, std::size_t n) {
    out.iteration.resize(n);
    out.models.resize(n);
    out.log_post.resize(n);
    out.accepted.resize(n);
    out.g.resize(n);
    out.shape.resize(n);
  }

  std::size_t stride_;
  std::optional<std::size_t> target_;
};

inline void record(ChainOutput& out, std::size_t iter, const Chain& chain, bool accepted) {
  const ChainState& s = chain.state();
  out.iteration.push_back(iter);
  out.models.push_back(s.gamma);
  out.log_post.push_back(s.log_post);
  out.accepted.push_back(accepted ? 1 : 0);
  out.g.push_back(s.g);
  out.shape.push_back(s.shape_k.value_or(std::numeric_limits<double>::quiet_NaN()));
}

}  // namespace detail

/// Runs one chain for a fixed number of iterations, or until the wall-clock
/// budget is spent when one is configured. PIPs are ergodic averages over
/// every post-burn-in iteration (not only the recorded ones).
inline ChainOutput run_chain(const Dataset& data, const PriorConfig& prior, const ChainConfig& cfg,
                             std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  Chain chain(data, prior, cfg, Rng(seed));
  ChainOutput out;
  out.seed = seed;
  out.target = target_label(cfg.acceptance);
  out.burn_in = cfg.effective_burn_in();
  detail::ThinnedRecorder recorder(cfg.budget_seconds ? 1 : cfg.thin,
                                   cfg.budget_seconds ? std::optional<std::size_t>(cfg.thin_target) : std::nullopt);
  detail::record(out, 0, chain, false);

  const Index p = data.p();
  Vector inc_sum = Vector::Zero(p);
  std::size_t inc_count = 0;
  const std::size_t cap = cfg.budget_seconds ? (cfg.iterations > 0 ? cfg.iterations : SIZE_MAX) : cfg.iterations;
  for (std::size_t it = 1; it <= cap; ++it) {
    const auto t0 = Clock::now();
    chain.step();
    const auto t1 = Clock::now();
    out.iter_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    out.iterations = it;
    if (chain.last_accepted()) ++out.accepted_moves;
    if (it > out.burn_in) {
      for (Index j : chain.state().gamma.included()) inc_sum[j] += 1.0;
      ++inc_count;
    }
    if (recorder.wants(it)) {
      detail::record(out, it, chain, chain.last_accepted());
      recorder.after_record(out);
    }
    if (cfg.budget_seconds && std::chrono::duration<double>(t1 - start).count() >= *cfg.budget_seconds) break;
  }
  recorder.finish(out);
  out.estimator_failures = chain.estimator_failures();
  if (inc_count > 0) {
    out.pip = inc_sum / static_cast<double>(inc_count);
  } else {
    out.pip = Vector::Zero(p);
    for (Index j : chain.state().gamma.included()) out.pip[j] = 1.0;
  }
  out.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

/// Seed of chain c derived from the base seed.
inline std::uint64_t chain_seed(std::uint64_t base, std::size_t c) {
  std::seed_seq seq{static_cast<std::uint32_t>(base & 0xffffffffULL), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(c)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

/// Independent chains on up to `workers` threads; results are ordered by chain index.
inline std::vector<ChainOutput> run_chains(const Dataset& data, const PriorConfig& prior, const ChainConfig& cfg,
                                           std::uint64_t seed, std::size_t chains, std::size_t workers = 1) {
  if (chains < 1) throw ConfigError("at least one chain is required");
  cfg.validate(data);
  prior.validate();
  std::vector<ChainOutput> outputs(chains);
  std::vector<std::exception_ptr> errors(chains);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chains) return;
      try {
        outputs[c] = run_chain(data, prior, cfg, chain_seed(seed, c));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(workers, chains));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outputs;
}

}  // namespace parni
