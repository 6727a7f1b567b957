#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ecoc_rl/core.hpp"
#include "ecoc_rl/ecoc.hpp"
#include "ecoc_rl/error.hpp"
#include "ecoc_rl/linear.hpp"
#include "ecoc_rl/mdp.hpp"
#include "ecoc_rl/parallel.hpp"
#include "ecoc_rl/policy.hpp"
#include "ecoc_rl/random.hpp"

namespace ecoc_rl {

struct LearnerConfig {
  std::size_t sampled_states = 1000;  // S
  std::size_t trajectories = 10;      // K
  std::size_t horizon = 100;          // T
  double alpha = 0.5;
  double margin = 2.0;  // delta
  std::size_t max_iterations = 10;
  double agreement_threshold = 0.98;
  double redundancy = 10.0;
  double discount = 0.99;
  std::uint64_t seed = 0;

  std::size_t epochs = 1000;
  double learning_rate = 0.1;
  std::size_t workers = 1;
  bool resample_states = false;
  std::size_t matrix_retries = 50;

  // Per-iteration evaluation of the learned policy; 0 episodes disables it.
  std::size_t eval_episodes = 0;
  std::size_t eval_horizon = 100;
  double eval_discount = 1.0;

  void validate() const {
    if (sampled_states < 1) throw ConfigError("learner: sampled state count must be >= 1");
    if (trajectories < 1) throw ConfigError("learner: trajectory count must be >= 1");
    if (horizon < 1) throw ConfigError("learner: horizon must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("learner: alpha must be in [0, 1]");
    if (!(margin >= 0.0)) throw ConfigError("learner: margin must be >= 0");
    if (max_iterations < 1) throw ConfigError("learner: max_iterations must be >= 1");
    if (!(agreement_threshold > 0.0 && agreement_threshold <= 1.0))
      throw ConfigError("learner: agreement threshold must be in (0, 1]");
    if (!(redundancy >= 1.0)) throw ConfigError("learner: redundancy must be >= 1");
    if (!(discount > 0.0 && discount <= 1.0)) throw ConfigError("learner: discount must be in (0, 1]");
    if (epochs < 1) throw ConfigError("learner: epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learner: learning rate must be positive");
    if (workers < 1) throw ConfigError("learner: workers must be >= 1");
    if (matrix_retries < 1) throw ConfigError("learner: matrix_retries must be >= 1");
    if (eval_horizon < 1) throw ConfigError("learner: eval horizon must be >= 1");
    if (!(eval_discount > 0.0 && eval_discount <= 1.0)) throw ConfigError("learner: eval discount must be in (0, 1]");
  }

  RolloutConfig rollout() const { return {trajectories, horizon, discount}; }
  TrainOptions train_options() const { return {epochs, learning_rate, true}; }
};

struct TrainingRecord {
  std::size_t iteration = 0;  // 1-based
  double avg_reward = std::numeric_limits<double>::quiet_NaN();
  double agreement = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t rollouts_run = 0;
  std::uint64_t transitions_taken = 0;
  std::int64_t sim_wall_ns = 0;
  std::int64_t learn_wall_ns = 0;
  std::int64_t iteration_wall_ns = 0;
  std::size_t nonterminal_states = 0;  // S'
  std::size_t labeled_states = 0;
  std::vector<std::string> notes;
};

struct Label {
  std::size_t state = 0;  // index into the state list given to collect_labels
  ActionId action{};
  double advantage = 0.0;  // Q(s, a*) - max over a != a* of Q(s, a)
  double threshold = 0.0;  // delta * pooled standard error
};

struct LabelSet {
  std::vector<Label> labels;
  std::size_t nonterminal_states = 0;

  bool empty() const noexcept { return labels.empty(); }
};

/// Rollout estimates of every action on every non-terminal state, then the
/// margin filter. The (state i, action a) cell uses seed derive_seed(seed, i, a),
/// so the result does not depend on `workers`.
template <Environment Env>
LabelSet collect_labels(const Env& env, const Policy& policy, std::span<const typename Env::State> states,
                        const RolloutConfig& cfg, double margin, std::uint64_t seed, SimCounter& counter,
                        std::size_t workers = 1) {
  if (states.empty()) throw DomainError("collect_labels: empty state set");
  cfg.validate();
  const std::size_t na = env.action_count();
  if (na < 2) throw DomainError("collect_labels: need at least two actions");

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (!env.is_terminal(states[i])) active.push_back(i);

  std::vector<RolloutEstimate> est(active.size() * na);
  std::vector<SimCounter> per_worker(std::max<std::size_t>(workers, 1));
  parallel_for(est.size(), workers, [&](std::size_t cell, std::size_t w) {
    const std::size_t i = active[cell / na];
    const std::size_t a = cell % na;
    est[cell] = rollout_estimate(env, states[i], ActionId{a}, policy, cfg, derive_seed(seed, i, a), per_worker[w]);
  });
  for (const auto& c : per_worker) counter += c;

  LabelSet out;
  out.nonterminal_states = active.size();
  for (std::size_t k = 0; k < active.size(); ++k) {
    const RolloutEstimate* q = est.data() + k * na;
    std::size_t best = 0;
    for (std::size_t a = 1; a < na; ++a)
      if (q[a].mean > q[best].mean) best = a;
    std::size_t runner = best == 0 ? 1 : 0;
    for (std::size_t a = 0; a < na; ++a)
      if (a != best && q[a].mean > q[runner].mean) runner = a;
    const double advantage = q[best].mean - q[runner].mean;
    if (!(advantage > 0.0)) continue;
    const double se1 = q[best].standard_error();
    const double se2 = q[runner].standard_error();
    const double threshold = margin * std::sqrt(0.5 * (se1 * se1 + se2 * se2));
    if (advantage >= threshold) out.labels.push_back({active[k], ActionId{best}, advantage, threshold});
  }
  return out;
}

/// Training targets of code bit i: each label (s, a*) becomes M[a*, i].
inline std::vector<int> relabel_for_bit(const LabelSet& labels, const CodingMatrix& m, std::size_t i) {
  if (i >= m.code_length()) throw DomainError("relabel_for_bit: bit out of range");
  std::vector<int> out;
  out.reserve(labels.labels.size());
  for (const auto& l : labels.labels) out.push_back(m.bit(l.action.index, i));
  return out;
}

/// Two-action view of a base MDP through one code column: every step of
/// action 0 ('+') or 1 ('-') executes an action drawn uniformly from the
/// corresponding half of the split.
template <Environment Env>
class SubMdp {
 public:
  using State = typename Env::State;

  SubMdp(const Env& base, ColumnSplit split) : base_(&base), split_(std::move(split)) {
    if (split_.positive.empty() || split_.negative.empty()) throw DomainError("sub-mdp: empty action set");
    std::vector<bool> seen(base.action_count(), false);
    for (const auto* side : {&split_.positive, &split_.negative})
      for (ActionId a : *side) {
        if (a.index >= seen.size() || seen[a.index]) throw DomainError("sub-mdp: split is not a partition");
        seen[a.index] = true;
      }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw DomainError("sub-mdp: split does not cover every action");
  }

  std::size_t action_count() const noexcept { return 2; }
  std::size_t feature_dim() const { return base_->feature_dim(); }
  State sample_state(Rng& rng) const { return base_->sample_state(rng); }
  bool is_terminal(const State& s) const { return base_->is_terminal(s); }
  void features(const State& s, std::span<double> out) const { base_->features(s, out); }

  ActionId base_action(ActionId a, Rng& rng) const {
    if (a.index > 1) throw DomainError("sub-mdp: action must be 0 (+) or 1 (-)");
    const auto& side = a.index == 0 ? split_.positive : split_.negative;
    return side[uniform_index(rng, side.size())];
  }

  Transition<State> step(const State& s, ActionId a, Rng& rng) const { return base_->step(s, base_action(a, rng), rng); }

  const Env& base() const noexcept { return *base_; }
  const std::vector<ActionId>& positive_set() const noexcept { return split_.positive; }
  const std::vector<ActionId>& negative_set() const noexcept { return split_.negative; }

 private:
  const Env* base_;
  ColumnSplit split_;
};

/// The returned view refers to `base`, which must outlive it.
template <Environment Env>
SubMdp<Env> make_sub_mdp(const Env& base, const CodingMatrix& m, std::size_t i) {
  if (m.action_count() != base.action_count()) throw DomainError("make_sub_mdp: matrix and MDP disagree on A");
  if (i >= m.code_length()) throw DomainError("make_sub_mdp: column out of range");
  return SubMdp<Env>(base, column_split(m, i));
}

/// Fraction of non-terminal states on which the two policies choose the same
/// action. Stochastic policies draw from `rng`.
template <Environment Env>
double policy_agreement(const Env& env, const Policy& p1, const Policy& p2, std::span<const typename Env::State> states,
                        Rng& rng) {
  if (states.empty()) throw DomainError("policy_agreement: empty state set");
  std::vector<double> x(env.feature_dim());
  std::size_t same = 0;
  std::size_t total = 0;
  for (const auto& s : states) {
    if (env.is_terminal(s)) continue;
    env.features(s, x);
    ++total;
    if (p1.act(x, rng) == p2.act(x, rng)) ++same;
  }
  if (total == 0) throw DomainError("policy_agreement: every state is terminal");
  return static_cast<double>(same) / static_cast<double>(total);
}

namespace detail {
enum SeedTag : std::uint64_t { kStatesTag = 1, kRolloutTag, kTrainTag, kAgreeTag, kEvalTag, kCodeTag, kBitTag };
}  // namespace detail

/// The sampled state set a learner run with `cfg` uses in `iteration` (1-based).
template <Environment Env>
std::vector<typename Env::State> training_states(const Env& env, const LearnerConfig& cfg, std::size_t iteration = 1) {
  Rng rng(cfg.resample_states ? derive_seed(cfg.seed, detail::kStatesTag, iteration)
                              : derive_seed(cfg.seed, detail::kStatesTag));
  return sample_uniform_states(env, cfg.sampled_states, rng);
}

struct LearnerResult {
  PolicyPtr policy;          // last learned deterministic policy
  PolicyPtr rollout_policy;  // alpha-mixture used for the last rollouts
  std::vector<TrainingRecord> records;
  std::optional<CodingMatrix> matrix;
  std::vector<std::vector<TrainingRecord>> sub_records;  // BRCPI, one list per bit
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline std::int64_t elapsed_ns(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(to - from).count();
}

struct LoopOutput {
  PolicyPtr learned;
  PolicyPtr rollout;
  std::vector<TrainingRecord> records;
  std::vector<PolicyPtr> history;  // learned policy after each iteration (null until the first success)
};

/// Shared policy-iteration loop. States are drawn from `states_seed`, all
/// other randomness from `seed`. `learn(states, labels, train_seed)` returns
/// the new deterministic policy; `evaluate(policy)` fills avg_reward.
template <Environment Env, typename Learn, typename Evaluate>
LoopOutput rcpi_loop(const Env& env, const LearnerConfig& cfg, std::uint64_t states_seed, std::uint64_t seed,
                     std::size_t workers, Learn&& learn, Evaluate&& evaluate) {
  const PolicyPtr initial = std::make_shared<RandomPolicy>(env.action_count());
  LoopOutput out;
  out.rollout = initial;
  PolicyPtr previous = initial;
  std::vector<typename Env::State> states;
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    if (it == 1 || cfg.resample_states) {
      LearnerConfig sampling = cfg;
      sampling.seed = states_seed;
      states = training_states(env, sampling, it);
    }
    TrainingRecord rec;
    rec.iteration = it;
    SimCounter counter;
    const auto t0 = Clock::now();
    const LabelSet labels =
        collect_labels<Env>(env, *out.rollout, states, cfg.rollout(), cfg.margin, derive_seed(seed, kRolloutTag, it),
                            counter, workers);
    const auto t1 = Clock::now();
    rec.rollouts_run = counter.rollouts_run;
    rec.transitions_taken = counter.transitions_taken;
    rec.nonterminal_states = labels.nonterminal_states;
    rec.labeled_states = labels.labels.size();
    rec.sim_wall_ns = elapsed_ns(t0, t1);
    if (labels.empty()) {
      rec.notes.push_back("no state passed the margin filter; keeping the previous policy");
      rec.iteration_wall_ns = rec.sim_wall_ns;
      rec.avg_reward = evaluate(*previous);
      out.records.push_back(std::move(rec));
      out.history.push_back(out.learned);
      continue;
    }
    PolicyPtr fresh = learn(std::span<const typename Env::State>(states), labels, derive_seed(seed, kTrainTag, it));
    out.rollout = std::make_shared<AlphaMixturePolicy>(out.rollout, fresh, cfg.alpha);
    const auto t2 = Clock::now();
    rec.learn_wall_ns = elapsed_ns(t1, t2);
    rec.iteration_wall_ns = elapsed_ns(t0, t2);
    Rng agree_rng(derive_seed(seed, kAgreeTag, it));
    rec.agreement = policy_agreement<Env>(env, *previous, *fresh, states, agree_rng);
    rec.avg_reward = evaluate(*fresh);
    out.learned = fresh;
    previous = fresh;
    out.history.push_back(fresh);
    const bool converged = rec.agreement >= cfg.agreement_threshold;
    out.records.push_back(std::move(rec));
    if (converged) break;
  }
  return out;
}

template <Environment Env>
double evaluate_if_enabled(const Env& env, const Policy& policy, const LearnerConfig& cfg) {
  if (cfg.eval_episodes == 0) return std::numeric_limits<double>::quiet_NaN();
  return evaluate_policy(env, policy, cfg.eval_episodes, cfg.eval_horizon, cfg.eval_discount,
                         derive_seed(cfg.seed, kEvalTag))
      .mean_return;
}

inline std::vector<LinearClassifier> train_all(std::vector<LabeledSet>& sets, const TrainOptions& opts,
                                               std::uint64_t seed, std::size_t workers) {
  std::vector<std::optional<LinearClassifier>> trained(sets.size());
  parallel_for(sets.size(), workers, [&](std::size_t k, std::size_t) {
    Rng rng(derive_seed(seed, k));
    trained[k] = train(sets[k], opts, rng);
  });
  std::vector<LinearClassifier> out;
  out.reserve(trained.size());
  for (auto& c : trained) out.push_back(std::move(*c));
  return out;
}

template <Environment Env>
LearnerResult finish(const Env& env, LoopOutput&& loop) {
  LearnerResult result;
  result.policy = loop.learned ? loop.learned : std::make_shared<RandomPolicy>(env.action_count());
  result.rollout_policy = loop.rollout;
  result.records = std::move(loop.records);
  if (!loop.learned && !result.records.empty())
    result.records.back().notes.push_back("no policy was learned; returning the uniform random policy");
  return result;
}

}  // namespace detail

/// RCPI with one classifier per action.
template <Environment Env>
LearnerResult train_ova_rcpi(const Env& env, const LearnerConfig& cfg) {
  cfg.validate();
  const std::size_t na = env.action_count();
  if (na < 2) throw DomainError("train_ova_rcpi: need at least two actions");
  const std::size_t dim = env.feature_dim();
  auto learn = [&](std::span<const typename Env::State> states, const LabelSet& labels, std::uint64_t seed) -> PolicyPtr {
    std::vector<LabeledSet> sets(na, LabeledSet(dim));
    std::vector<double> x(dim);
    for (const auto& l : labels.labels) {
      env.features(states[l.state], x);
      for (std::size_t a = 0; a < na; ++a) sets[a].add(x, a == l.action.index ? 1 : -1);
    }
    return std::make_shared<OvaPolicy>(detail::train_all(sets, cfg.train_options(), seed, cfg.workers));
  };
  auto evaluate = [&](const Policy& p) { return detail::evaluate_if_enabled(env, p, cfg); };
  return detail::finish(env, detail::rcpi_loop(env, cfg, cfg.seed, cfg.seed, cfg.workers, learn, evaluate));
}

/// Coding matrix used by ERCPI and BRCPI for a given config.
inline CodingMatrix learner_matrix(std::size_t actions, const LearnerConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, detail::kCodeTag));
  return generate_random_matrix(actions, code_length(actions, cfg.redundancy), rng, cfg.matrix_retries);
}

/// RCPI whose labels are relabeled into code bits; C classifiers instead of A.
template <Environment Env>
LearnerResult train_ercpi(const Env& env, const LearnerConfig& cfg, std::optional<CodingMatrix> matrix = std::nullopt) {
  cfg.validate();
  const std::size_t na = env.action_count();
  if (na < 2) throw DomainError("train_ercpi: need at least two actions");
  if (!matrix) matrix = learner_matrix(na, cfg);
  if (matrix->action_count() != na) throw DomainError("train_ercpi: matrix and MDP disagree on A");
  const CodingMatrix& m = *matrix;
  const std::size_t dim = env.feature_dim();
  auto learn = [&](std::span<const typename Env::State> states, const LabelSet& labels, std::uint64_t seed) -> PolicyPtr {
    std::vector<LabeledSet> sets(m.code_length(), LabeledSet(dim));
    std::vector<std::vector<int>> targets;
    for (std::size_t i = 0; i < m.code_length(); ++i) targets.push_back(relabel_for_bit(labels, m, i));
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < labels.labels.size(); ++k) {
      env.features(states[labels.labels[k].state], x);
      for (std::size_t i = 0; i < m.code_length(); ++i) sets[i].add(x, targets[i][k]);
    }
    return std::make_shared<EcocPolicy>(m, detail::train_all(sets, cfg.train_options(), seed, cfg.workers));
  };
  auto evaluate = [&](const Policy& p) { return detail::evaluate_if_enabled(env, p, cfg); };
  LearnerResult result = detail::finish(env, detail::rcpi_loop(env, cfg, cfg.seed, cfg.seed, cfg.workers, learn, evaluate));
  result.matrix = m;
  return result;
}

/// C independent binary RCPI runs, one per sub-MDP, assembled into an
/// EcocPolicy. Bit i uses base seed derive_seed(cfg.seed, i) for everything
/// except the shared sampled states, so sub-problems can run in any order.
template <Environment Env>
LearnerResult train_brcpi(const Env& env, const LearnerConfig& cfg, std::optional<CodingMatrix> matrix = std::nullopt,
                          std::span<const std::size_t> order = {}) {
  cfg.validate();
  const std::size_t na = env.action_count();
  if (na < 2) throw DomainError("train_brcpi: need at least two actions");
  if (!matrix) matrix = learner_matrix(na, cfg);
  if (matrix->action_count() != na) throw DomainError("train_brcpi: matrix and MDP disagree on A");
  const CodingMatrix& m = *matrix;
  const std::size_t c = m.code_length();
  const std::size_t dim = env.feature_dim();

  std::vector<std::size_t> schedule(order.begin(), order.end());
  if (schedule.empty())
    for (std::size_t i = 0; i < c; ++i) schedule.push_back(i);
  if (schedule.size() != c) throw DomainError("train_brcpi: order must list every bit once");
  {
    auto sorted = schedule;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < c; ++i)
      if (sorted[i] != i) throw DomainError("train_brcpi: order must list every bit once");
  }

  const std::size_t outer = std::min(cfg.workers, c);
  const std::size_t inner = outer > 1 ? 1 : cfg.workers;
  std::vector<detail::LoopOutput> loops(c);
  parallel_for(c, outer, [&](std::size_t slot, std::size_t) {
    const std::size_t i = schedule[slot];
    const SubMdp<Env> sub = make_sub_mdp(env, m, i);
    const std::uint64_t bit_seed = derive_seed(cfg.seed, detail::kBitTag, i);
    auto learn = [&](std::span<const typename Env::State> states, const LabelSet& labels,
                     std::uint64_t seed) -> PolicyPtr {
      LabeledSet set(dim);
      std::vector<double> x(dim);
      for (const auto& l : labels.labels) {
        sub.features(states[l.state], x);
        set.add(x, l.action == BinarySubPolicy::kPositive ? 1 : -1);
      }
      Rng rng(seed);
      return std::make_shared<BinarySubPolicy>(train(set, cfg.train_options(), rng));
    };
    auto no_eval = [](const Policy&) { return std::numeric_limits<double>::quiet_NaN(); };
    // Every bit sees the base problem's sampled states.
    loops[i] = detail::rcpi_loop(sub, cfg, cfg.seed, bit_seed, inner, learn, no_eval);
  });

  auto classifier_at = [&](std::size_t i, std::size_t iteration, std::vector<std::string>& notes) {
    const auto& hist = loops[i].history;
    PolicyPtr p;
    if (!hist.empty()) p = hist[std::min(iteration, hist.size()) - 1];
    if (!p) {
      notes.push_back("bit " + std::to_string(i) + " has no learned classifier; it always outputs '+'");
      return LinearClassifier(std::vector<double>(dim, 0.0), 0.0);
    }
    return static_cast<const BinarySubPolicy&>(*p).classifier();
  };

  LearnerResult result;
  result.matrix = m;
  std::size_t iterations = 0;
  for (const auto& l : loops) iterations = std::max(iterations, l.records.size());
  for (std::size_t it = 1; it <= iterations; ++it) {
    TrainingRecord rec;
    rec.iteration = it;
    double agreement_sum = 0.0;
    std::size_t agreement_count = 0;
    for (std::size_t i = 0; i < c; ++i) {
      if (loops[i].records.size() < it) continue;
      const auto& r = loops[i].records[it - 1];
      rec.rollouts_run += r.rollouts_run;
      rec.transitions_taken += r.transitions_taken;
      rec.sim_wall_ns += r.sim_wall_ns;
      rec.learn_wall_ns += r.learn_wall_ns;
      rec.iteration_wall_ns += r.iteration_wall_ns;
      rec.nonterminal_states = std::max(rec.nonterminal_states, r.nonterminal_states);
      rec.labeled_states += r.labeled_states;
      if (!std::isnan(r.agreement)) {
        agreement_sum += r.agreement;
        ++agreement_count;
      }
      for (const auto& n : r.notes) rec.notes.push_back("bit " + std::to_string(i) + ": " + n);
    }
    if (agreement_count > 0) rec.agreement = agreement_sum / static_cast<double>(agreement_count);
    if (cfg.eval_episodes > 0) {
      std::vector<LinearClassifier> cls;
      std::vector<std::string> ignored;
      for (std::size_t i = 0; i < c; ++i) cls.push_back(classifier_at(i, it, ignored));
      rec.avg_reward = detail::evaluate_if_enabled(env, EcocPolicy(m, std::move(cls)), cfg);
    }
    result.records.push_back(std::move(rec));
  }

  std::vector<LinearClassifier> final_cls;
  std::vector<std::string> notes;
  for (std::size_t i = 0; i < c; ++i) final_cls.push_back(classifier_at(i, iterations, notes));
  if (!result.records.empty())
    for (auto& n : notes) result.records.back().notes.push_back(std::move(n));
  result.policy = std::make_shared<EcocPolicy>(m, std::move(final_cls));

  result.rollout_policy = result.policy;
  for (auto& l : loops) result.sub_records.push_back(std::move(l.records));
  return result;
}

/// Header matching TrainingRecord's serialized columns.
inline constexpr const char* kRecordCsvHeader =
    "iteration,avg_reward,agreement,rollouts_run,transitions_taken,sim_wall_ns,learn_wall_ns";

/// One CSV row per record; with `timing` off the wall-time columns are 0 so
/// that runs with equal seeds produce identical bytes.
inline void write_records_csv(std::ostream& os, std::span<const TrainingRecord> records, bool timing = true,
                              bool header = true) {
  if (header) os << kRecordCsvHeader << "\n";
  for (const auto& r : records) {
    os << r.iteration << ',' << detail::format_double(r.avg_reward) << ',' << detail::format_double(r.agreement) << ','
       << r.rollouts_run << ',' << r.transitions_taken << ',' << (timing ? r.sim_wall_ns : 0) << ','
       << (timing ? r.learn_wall_ns : 0) << "\n";
  }
}

}  // namespace ecoc_rl
