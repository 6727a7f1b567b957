#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "ecoc_rl/random.hpp"

namespace ecoc_rl {

/// Index of a discrete action in [0, action_count).
struct ActionId {
  std::size_t index = 0;

  friend constexpr auto operator<=>(const ActionId&, const ActionId&) = default;
};

/// Dense real-valued state representation consumed by linear classifiers.
using FeatureVector = std::vector<double>;

/// Outcome of one environment transition.
template <typename State>
struct Transition {
  State next;
  double reward = 0.0;
  bool terminal = false;
};

/// A mapping from state features to actions.
///
/// Policies are immutable after construction. act() may consume randomness
/// from the caller's generator, which makes a policy safe to share between
/// threads as long as each thread owns its generator.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::size_t action_count() const = 0;

  virtual ActionId act(std::span<const double> features, Rng& rng) const = 0;

  /// False when act() ignores its features; lets simulators skip computing them.
  virtual bool uses_features() const { return true; }
};

}  // namespace ecoc_rl
