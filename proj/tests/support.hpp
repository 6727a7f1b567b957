#pragma once

// Small environments used across the test files.

#include <cstddef>
#include <span>
#include <vector>

#include "ecoc_rl/core.hpp"
#include "ecoc_rl/random.hpp"

namespace testenv {

using ecoc_rl::ActionId;
using ecoc_rl::Rng;
using ecoc_rl::Transition;

// Integer line; every action moves one step right with reward -1 and never
// terminates. All actions are interchangeable.
class Chain {
 public:
  struct State {
    int x = 0;
  };
  explicit Chain(std::size_t actions = 3) : actions_(actions) {}
  std::size_t action_count() const { return actions_; }
  std::size_t feature_dim() const { return 2; }
  State sample_state(Rng& rng) const { return {static_cast<int>(ecoc_rl::uniform_index(rng, 100))}; }
  bool is_terminal(const State&) const { return false; }
  Transition<State> step(const State& s, ActionId, Rng&) const { return {{s.x + 1}, -1.0, false}; }
  void features(const State& s, std::span<double> out) const {
    out[0] = static_cast<double>(s.x);
    out[1] = 1.0;
  }

 private:
  std::size_t actions_;
};

// Single self-looping state; reward = scale * action index.
class IndexReward {
 public:
  struct State {
    int x = 0;
  };
  IndexReward(std::size_t actions, double scale = 1.0, bool terminal_after_step = true)
      : actions_(actions), scale_(scale), terminal_(terminal_after_step) {}
  std::size_t action_count() const { return actions_; }
  std::size_t feature_dim() const { return 1; }
  State sample_state(Rng&) const { return {}; }
  bool is_terminal(const State& s) const { return s.x != 0; }
  Transition<State> step(const State&, ActionId a, Rng&) const {
    return {{terminal_ ? 1 : 0}, scale_ * static_cast<double>(a.index), terminal_};
  }
  void features(const State&, std::span<double> out) const { out[0] = 1.0; }

 private:
  std::size_t actions_;
  double scale_;
  bool terminal_;
};

}  // namespace testenv
