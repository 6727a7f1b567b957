#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "ecoc_rl/core.hpp"
#include "ecoc_rl/error.hpp"
#include "ecoc_rl/random.hpp"

namespace ecoc_rl {

struct MountainCarConfig {
  std::size_t action_count = 3;
  double max_acceleration = 1.0;
  std::size_t tilings = 8;
  std::size_t tiles_per_dim = 8;
};

/// Mountain Car with A evenly spaced accelerations in [-a_max, +a_max] and
/// binary tile-coded features (exactly `tilings` active entries per state).
class MountainCarEnv {
 public:
  struct State {
    double position = -0.5;
    double velocity = 0.0;

    friend bool operator==(const State&, const State&) = default;
  };

  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.5;
  static constexpr double kForce = 0.001;
  static constexpr double kGravity = 0.0025;

  explicit MountainCarEnv(MountainCarConfig cfg = {}) : cfg_(cfg) {
    if (cfg_.action_count < 2 || cfg_.action_count > 1000)
      throw ConfigError("mountain car: action count must be in [2, 1000]");
    if (!(cfg_.max_acceleration > 0.0)) throw ConfigError("mountain car: max acceleration must be positive");
    if (cfg_.tilings < 1 || cfg_.tiles_per_dim < 1) throw ConfigError("mountain car: empty tile coding");
  }

  const MountainCarConfig& config() const noexcept { return cfg_; }
  std::size_t action_count() const noexcept { return cfg_.action_count; }
  std::size_t feature_dim() const noexcept { return cfg_.tilings * cfg_.tiles_per_dim * cfg_.tiles_per_dim; }

  double acceleration(ActionId a) const {
    if (a.index >= cfg_.action_count) throw DomainError("mountain car: action out of range");
    const double frac = static_cast<double>(a.index) / static_cast<double>(cfg_.action_count - 1);
    return cfg_.max_acceleration * (2.0 * frac - 1.0);
  }

  State sample_state(Rng& rng) const {
    const double p = uniform_real(rng, kMinPosition, kMaxPosition);
    const double v = uniform_real(rng, -kMaxSpeed, kMaxSpeed);
    return {p, v};
  }

  bool is_terminal(const State& s) const noexcept { return s.position >= kGoalPosition; }

  /// Deterministic; -1 per step, 0 on the step that reaches the goal.
  Transition<State> step(const State& s, ActionId a, Rng&) const {
    State next = s;
    next.velocity += acceleration(a) * kForce + std::cos(3.0 * s.position) * (-kGravity);
    next.velocity = std::clamp(next.velocity, -kMaxSpeed, kMaxSpeed);
    next.position += next.velocity;
    next.position = std::clamp(next.position, kMinPosition, kMaxPosition);
    if (next.position <= kMinPosition && next.velocity < 0.0) next.velocity = 0.0;
    const bool terminal = is_terminal(next);
    return {next, terminal ? 0.0 : -1.0, terminal};
  }

  /// Each tiling is a tiles x tiles grid over (position, velocity), shifted by
  /// k/tilings of a tile along the displacement (1, 3); indices beyond the
  /// grid clamp to the border tile.
  void features(const State& s, std::span<double> out) const {
    if (out.size() != feature_dim()) throw DomainError("mountain car: feature buffer has wrong size");
    std::fill(out.begin(), out.end(), 0.0);
    const auto n = static_cast<double>(cfg_.tiles_per_dim);
    const double px = (s.position - kMinPosition) / (kMaxPosition - kMinPosition) * n;
    const double vx = (s.velocity + kMaxSpeed) / (2.0 * kMaxSpeed) * n;
    const auto max_index = static_cast<long>(cfg_.tiles_per_dim) - 1;
    for (std::size_t k = 0; k < cfg_.tilings; ++k) {
      const double shift = static_cast<double>(k) / static_cast<double>(cfg_.tilings);
      const long ip = std::clamp(static_cast<long>(std::floor(px + shift)), 0L, max_index);
      const long iv = std::clamp(static_cast<long>(std::floor(vx + std::fmod(3.0 * shift, 1.0))), 0L, max_index);
      const std::size_t base = k * cfg_.tiles_per_dim * cfg_.tiles_per_dim;
      out[base + static_cast<std::size_t>(ip) * cfg_.tiles_per_dim + static_cast<std::size_t>(iv)] = 1.0;
    }
  }

 private:
  MountainCarConfig cfg_;
};

inline Transition<MountainCarEnv::State> mountain_car_transition(const MountainCarEnv& env,
                                                                 const MountainCarEnv::State& s, ActionId a, Rng& rng) {
  return env.step(s, a, rng);
}

}  // namespace ecoc_rl
