#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ecoc_rl/core.hpp"
#include "ecoc_rl/error.hpp"
#include "ecoc_rl/random.hpp"

namespace ecoc_rl {

/// A generative MDP model.
///
/// Dynamics are const member functions driven by the caller's generator, so
/// one instance can serve any number of concurrent simulations. A terminal
/// state absorbs: nothing is simulated from it and its remaining reward is 0.
template <typename E>
concept Environment = std::copy_constructible<typename E::State> &&
    requires(const E& env, const typename E::State& s, ActionId a, Rng& rng, std::span<double> out) {
      { env.action_count() } -> std::convertible_to<std::size_t>;
      { env.feature_dim() } -> std::convertible_to<std::size_t>;
      { env.sample_state(rng) } -> std::same_as<typename E::State>;
      { env.step(s, a, rng) } -> std::same_as<Transition<typename E::State>>;
      { env.is_terminal(s) } -> std::convertible_to<bool>;
      env.features(s, out);
    };

struct RolloutConfig {
  std::size_t trajectories = 10;  // K
  std::size_t horizon = 100;      // T
  double discount = 0.99;

  void validate() const {
    if (trajectories == 0) throw ConfigError("rollout: trajectory count must be >= 1");
    if (horizon == 0) throw ConfigError("rollout: horizon must be >= 1");
    if (!(discount > 0.0 && discount <= 1.0)) throw ConfigError("rollout: discount must be in (0, 1]");
  }
};

/// Monte-Carlo estimate of Q(s, a).
struct RolloutEstimate {
  double mean = 0.0;
  std::size_t sample_count = 0;
  double sample_variance = 0.0;  // unbiased; 0 when sample_count < 2

  double standard_error() const {
    return sample_count == 0 ? 0.0 : std::sqrt(sample_variance / static_cast<double>(sample_count));
  }
};

/// Simulation-cost instrumentation. Merging is a plain sum, hence associative
/// and commutative; per-worker counters can be reduced in any order.
struct SimCounter {
  std::uint64_t transitions_taken = 0;
  std::uint64_t rollouts_run = 0;
  std::int64_t sim_wall_ns = 0;
  std::int64_t learn_wall_ns = 0;

  SimCounter& operator+=(const SimCounter& other) {
    transitions_taken += other.transitions_taken;
    rollouts_run += other.rollouts_run;
    sim_wall_ns += other.sim_wall_ns;
    learn_wall_ns += other.learn_wall_ns;
    return *this;
  }

  friend SimCounter operator+(SimCounter lhs, const SimCounter& rhs) { return lhs += rhs; }
  friend bool operator==(const SimCounter&, const SimCounter&) = default;
};

template <Environment Env>
std::vector<typename Env::State> sample_uniform_states(const Env& env, std::size_t n, Rng& rng) {
  std::vector<typename Env::State> states;
  states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) states.push_back(env.sample_state(rng));
  return states;
}

/// Draws uniformly sampled states until a non-terminal one comes up.
template <Environment Env>
typename Env::State sample_start_state(const Env& env, Rng& rng, std::size_t max_tries = 10000) {
  for (std::size_t i = 0; i < max_tries; ++i) {
    auto s = env.sample_state(rng);
    if (!env.is_terminal(s)) return s;
  }
  throw DomainError("sample_start_state: no non-terminal state found");
}

/// Estimates Q_pi(s, a) from cfg.trajectories independent trajectories.
///
/// Trajectory k draws from Rng(derive_seed(seed, k)). Its first transition
/// applies `a`, later ones follow `policy`; it stops at a terminal state or
/// after cfg.horizon transitions. `counter` gains exactly the transitions
/// taken and cfg.trajectories rollouts.
template <Environment Env>
RolloutEstimate rollout_estimate(const Env& env, const typename Env::State& s, ActionId a, const Policy& policy,
                                 const RolloutConfig& cfg, std::uint64_t seed, SimCounter& counter) {
  cfg.validate();
  if (a.index >= env.action_count()) throw DomainError("rollout_estimate: action out of range");
  if (env.is_terminal(s)) throw DomainError("rollout_estimate: start state is terminal");
  if (policy.action_count() != env.action_count())
    throw DomainError("rollout_estimate: policy and environment disagree on action count");

  const bool need_features = policy.uses_features();
  std::vector<double> features(need_features ? env.feature_dim() : 0);

  // Welford accumulation keeps the variance non-negative and stable.
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t transitions = 0;
  for (std::size_t k = 0; k < cfg.trajectories; ++k) {
    Rng rng(derive_seed(seed, k));
    typename Env::State state = s;
    ActionId action = a;
    double ret = 0.0;
    double weight = 1.0;
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
      Transition<typename Env::State> tr = env.step(state, action, rng);
      ret += weight * tr.reward;
      ++transitions;
      if (tr.terminal || t + 1 == cfg.horizon) break;
      state = std::move(tr.next);
      weight *= cfg.discount;
      if (need_features) env.features(state, features);
      action = policy.act(features, rng);
    }
    const double delta = ret - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (ret - mean);
  }
  counter.transitions_taken += transitions;
  counter.rollouts_run += cfg.trajectories;

  RolloutEstimate est;
  est.mean = mean;
  est.sample_count = cfg.trajectories;
  est.sample_variance = cfg.trajectories > 1 ? std::max(0.0, m2 / static_cast<double>(cfg.trajectories - 1)) : 0.0;
  return est;
}

struct EpisodeResult {
  double total_return = 0.0;
  std::size_t steps = 0;
};

/// Follows `policy` from s0 for at most `horizon` steps.
template <Environment Env>
EpisodeResult run_episode(const Env& env, const Policy& policy, const typename Env::State& s0, std::size_t horizon,
                          double discount, Rng& rng) {
  if (policy.action_count() != env.action_count())
    throw DomainError("run_episode: policy and environment disagree on action count");
  EpisodeResult result;
  if (env.is_terminal(s0)) return result;
  std::vector<double> features(env.feature_dim());
  typename Env::State state = s0;
  double weight = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (policy.uses_features()) env.features(state, features);
    const ActionId action = policy.act(features, rng);
    Transition<typename Env::State> tr = env.step(state, action, rng);
    result.total_return += weight * tr.reward;
    ++result.steps;
    if (tr.terminal) break;
    state = std::move(tr.next);
    weight *= discount;
  }
  return result;
}

struct EvaluationResult {
  double mean_return = 0.0;
  double stddev = 0.0;  // sample standard deviation of episode returns
  std::size_t episodes = 0;
};

/// Average return over `episodes` runs from fresh non-terminal start states.
/// Episode i uses Rng(derive_seed(seed, i)) for both its start state and its
/// dynamics, so two policies evaluated with one seed face the same starts.
template <Environment Env>
EvaluationResult evaluate_policy(const Env& env, const Policy& policy, std::size_t episodes, std::size_t horizon,
                                 double discount, std::uint64_t seed) {
  EvaluationResult out;
  out.episodes = episodes;
  if (episodes == 0) {
    out.mean_return = std::nan("");
    return out;
  }
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < episodes; ++i) {
    Rng rng(derive_seed(seed, i));
    const auto s0 = sample_start_state(env, rng);
    const double r = run_episode(env, policy, s0, horizon, discount, rng).total_return;
    const double delta = r - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (r - mean);
  }
  out.mean_return = mean;
  out.stddev = episodes > 1 ? std::sqrt(m2 / static_cast<double>(episodes - 1)) : 0.0;
  return out;
}

}  // namespace ecoc_rl
