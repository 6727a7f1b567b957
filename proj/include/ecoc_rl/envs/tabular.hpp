#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecoc_rl/core.hpp"
#include "ecoc_rl/error.hpp"
#include "ecoc_rl/random.hpp"

namespace ecoc_rl {

/// Finite MDP with explicit transition tensor and expected rewards.
///
/// Features are the one-hot encoding of the state. Terminal states absorb with
/// zero reward. Its exact solvers are the reference for Monte-Carlo code.
class TabularMdp {
 public:
  struct State {
    std::size_t index = 0;
    friend bool operator==(const State&, const State&) = default;
  };

  /// transitions: [s][a][s'] flattened; rewards: [s][a] flattened.
  TabularMdp(std::size_t states, std::size_t actions, std::vector<double> transitions, std::vector<double> rewards,
             double discount, std::vector<bool> terminal = {})
      : states_(states), actions_(actions), p_(std::move(transitions)), r_(std::move(rewards)), discount_(discount),
        terminal_(std::move(terminal)) {
    if (states_ < 1 || actions_ < 1) throw DomainError("tabular mdp: need at least one state and one action");
    if (p_.size() != states_ * actions_ * states_) throw DomainError("tabular mdp: transition tensor has wrong size");
    if (r_.size() != states_ * actions_) throw DomainError("tabular mdp: reward matrix has wrong size");
    if (!(discount_ > 0.0 && discount_ <= 1.0)) throw DomainError("tabular mdp: discount must be in (0, 1]");
    if (terminal_.empty()) terminal_.assign(states_, false);
    if (terminal_.size() != states_) throw DomainError("tabular mdp: terminal flags have wrong size");
    cdf_.resize(p_.size());
    for (std::size_t row = 0; row < states_ * actions_; ++row) {
      double sum = 0.0;
      for (std::size_t t = 0; t < states_; ++t) {
        const double p = p_[row * states_ + t];
        if (!(p >= 0.0)) throw DomainError("tabular mdp: negative transition probability");
        sum += p;
        cdf_[row * states_ + t] = sum;
      }
      if (std::abs(sum - 1.0) > 1e-12) throw DomainError("tabular mdp: transition row does not sum to 1");
      if (!std::isfinite(r_[row])) throw DomainError("tabular mdp: non-finite reward");
    }
  }

  /// Random instance: each (s, a) moves to `branching` distinct successor
  /// states with random weights; rewards uniform in [0, 1).
  static TabularMdp random(std::size_t states, std::size_t actions, double discount, Rng& rng,
                           std::size_t branching = 3) {
    branching = std::clamp<std::size_t>(branching, 1, states);
    std::vector<double> p(states * actions * states, 0.0);
    std::vector<double> r(states * actions);
    std::vector<std::size_t> targets(states);
    for (std::size_t row = 0; row < states * actions; ++row) {
      std::iota(targets.begin(), targets.end(), std::size_t{0});
      shuffle(std::span<std::size_t>(targets), rng);
      std::vector<double> w(branching);
      double total = 0.0;
      for (auto& x : w) total += (x = 0.05 + uniform01(rng));
      double assigned = 0.0;
      for (std::size_t k = 0; k + 1 < branching; ++k) assigned += (p[row * states + targets[k]] = w[k] / total);
      p[row * states + targets[branching - 1]] = 1.0 - assigned;
      r[row] = uniform01(rng);
    }
    return TabularMdp(states, actions, std::move(p), std::move(r), discount);
  }

  std::size_t state_count() const noexcept { return states_; }
  std::size_t action_count() const noexcept { return actions_; }
  std::size_t feature_dim() const noexcept { return states_; }
  double discount() const noexcept { return discount_; }

  double probability(std::size_t s, std::size_t a, std::size_t next) const {
    return p_[(s * actions_ + a) * states_ + next];
  }
  double reward(std::size_t s, std::size_t a) const { return r_[s * actions_ + a]; }
  bool terminal(std::size_t s) const { return terminal_[s]; }

  State sample_state(Rng& rng) const { return {static_cast<std::size_t>(uniform_index(rng, states_))}; }
  bool is_terminal(const State& s) const { return terminal_[s.index]; }

  /// Reward is the expected reward R(s, a); the successor is drawn from P(. | s, a).
  Transition<State> step(const State& s, ActionId a, Rng& rng) const {
    if (s.index >= states_ || a.index >= actions_) throw DomainError("tabular mdp: index out of range");
    const std::size_t row = s.index * actions_ + a.index;
    const double u = uniform01(rng);
    const double* cdf = cdf_.data() + row * states_;
    std::size_t next = static_cast<std::size_t>(std::upper_bound(cdf, cdf + states_, u) - cdf);
    next = std::min(next, states_ - 1);
    while (p_[row * states_ + next] == 0.0 && next > 0) --next;  // guard against u landing on a flat CDF tail
    return {State{next}, r_[row], terminal_[next]};
  }

  void features(const State& s, std::span<double> out) const {
    if (out.size() != states_) throw DomainError("tabular mdp: feature buffer has wrong size");
    std::fill(out.begin(), out.end(), 0.0);
    out[s.index] = 1.0;
  }

 private:
  std::size_t states_;
  std::size_t actions_;
  std::vector<double> p_;
  std::vector<double> cdf_;
  std::vector<double> r_;
  double discount_;
  std::vector<bool> terminal_;
};

/// Row-major [s][a] table.
struct QTable {
  std::size_t states = 0;
  std::size_t actions = 0;
  std::vector<double> values;

  double operator()(std::size_t s, std::size_t a) const { return values[s * actions + a]; }
  double& operator()(std::size_t s, std::size_t a) { return values[s * actions + a]; }

  double state_value(std::size_t s) const {
    return *std::max_element(values.begin() + static_cast<std::ptrdiff_t>(s * actions),
                             values.begin() + static_cast<std::ptrdiff_t>((s + 1) * actions));
  }
  std::size_t greedy_action(std::size_t s) const {
    const auto begin = values.begin() + static_cast<std::ptrdiff_t>(s * actions);
    return static_cast<std::size_t>(std::max_element(begin, begin + static_cast<std::ptrdiff_t>(actions)) - begin);
  }
};

/// Stochastic policy as a row-major [s][a] probability table.
using PolicyTable = std::vector<double>;

inline PolicyTable deterministic_policy_table(std::size_t states, std::size_t actions,
                                              std::span<const std::size_t> choice) {
  PolicyTable pi(states * actions, 0.0);
  for (std::size_t s = 0; s < states; ++s) pi[s * actions + choice[s]] = 1.0;
  return pi;
}

/// Tabulates a feature-based policy by querying it on each state's one-hot
/// features; stochastic policies are estimated from `samples` draws.
inline PolicyTable policy_table(const TabularMdp& m, const Policy& policy, Rng& rng, std::size_t samples = 1) {
  PolicyTable pi(m.state_count() * m.action_count(), 0.0);
  std::vector<double> x(m.feature_dim());
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    m.features({s}, x);
    for (std::size_t k = 0; k < samples; ++k) pi[s * m.action_count() + policy.act(x, rng).index] += 1.0;
    for (std::size_t a = 0; a < m.action_count(); ++a) pi[s * m.action_count() + a] /= static_cast<double>(samples);
  }
  return pi;
}

/// V_pi solved exactly from (I - discount * P_pi) V = r_pi.
inline std::vector<double> tabular_policy_value(const TabularMdp& m, std::span<const double> pi) {
  const auto n = static_cast<Eigen::Index>(m.state_count());
  if (pi.size() != m.state_count() * m.action_count()) throw DomainError("policy table has wrong size");
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    if (m.terminal(s)) continue;
    for (std::size_t a = 0; a < m.action_count(); ++a) {
      const double w = pi[s * m.action_count() + a];
      if (w == 0.0) continue;
      rhs(static_cast<Eigen::Index>(s)) += w * m.reward(s, a);
      for (std::size_t t = 0; t < m.state_count(); ++t)
        if (!m.terminal(t))
          lhs(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) -= m.discount() * w * m.probability(s, a, t);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible()) throw NumericError("tabular_policy_value: policy evaluation system is singular");
  const Eigen::VectorXd v = lu.solve(rhs);
  return {v.data(), v.data() + v.size()};
}

/// Q_pi(s, a) = R(s, a) + discount * sum_s' P(s' | s, a) V_pi(s').
inline QTable tabular_exact_q(const TabularMdp& m, std::span<const double> pi) {
  const auto v = tabular_policy_value(m, pi);
  QTable q{m.state_count(), m.action_count(), std::vector<double>(m.state_count() * m.action_count(), 0.0)};
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    if (m.terminal(s)) continue;
    for (std::size_t a = 0; a < m.action_count(); ++a) {
      double x = m.reward(s, a);
      for (std::size_t t = 0; t < m.state_count(); ++t) x += m.discount() * m.probability(s, a, t) * v[t];
      q(s, a) = x;
    }
  }
  return q;
}

/// Optimal Q by value iteration until the sup-norm Bellman residual drops below tol.
inline QTable tabular_value_iteration(const TabularMdp& m, double tol = 1e-10, std::size_t max_iterations = 1000000) {
  const std::size_t n = m.state_count();
  const std::size_t na = m.action_count();
  QTable q{n, na, std::vector<double>(n * na, 0.0)};
  std::vector<double> v(n, 0.0);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double residual = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (m.terminal(s)) continue;
      for (std::size_t a = 0; a < na; ++a) {
        double x = m.reward(s, a);
        for (std::size_t t = 0; t < n; ++t) x += m.discount() * m.probability(s, a, t) * v[t];
        residual = std::max(residual, std::abs(x - q(s, a)));
        q(s, a) = x;
      }
    }
    for (std::size_t s = 0; s < n; ++s) v[s] = m.terminal(s) ? 0.0 : q.state_value(s);
    if (residual < tol) return q;
  }
  throw NumericError("tabular_value_iteration: no convergence after " + std::to_string(max_iterations) + " sweeps");
}

/// max over (s, a) of |R + discount * P max Q - Q|.
inline double bellman_residual(const TabularMdp& m, const QTable& q) {
  double worst = 0.0;
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    if (m.terminal(s)) continue;
    for (std::size_t a = 0; a < m.action_count(); ++a) {
      double x = m.reward(s, a);
      for (std::size_t t = 0; t < m.state_count(); ++t)
        x += m.discount() * m.probability(s, a, t) * (m.terminal(t) ? 0.0 : q.state_value(t));
      worst = std::max(worst, std::abs(x - q(s, a)));
    }
  }
  return worst;
}

}  // namespace ecoc_rl
