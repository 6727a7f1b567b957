#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecoc_rl/core.hpp"
#include "ecoc_rl/ecoc.hpp"
#include "ecoc_rl/envs/tabular.hpp"
#include "ecoc_rl/error.hpp"
#include "ecoc_rl/random.hpp"

namespace ecoc_rl {

enum class Move : std::uint8_t { up = 0, down = 1, right = 2 };

/// Cell penalties, in the order used for feature counts and probabilities.
inline constexpr std::array<int, 3> kMazePenalties{-1, -10, -100};
inline constexpr std::array<char, 3> kMazeGlyphs{'.', 'o', 'X'};

/// All 3^L move sequences in lexicographic order (first move slowest), with
/// up < down < right.
inline std::vector<std::vector<Move>> all_move_sequences(std::size_t length) {
  std::vector<std::vector<Move>> out{{}};
  for (std::size_t k = 0; k < length; ++k) {
    std::vector<std::vector<Move>> next;
    next.reserve(out.size() * 3);
    for (const auto& prefix : out)
      for (Move m : {Move::up, Move::down, Move::right}) {
        auto seq = prefix;
        seq.push_back(m);
        next.push_back(std::move(seq));
      }
    out = std::move(next);
  }
  return out;
}

inline std::size_t pow3(std::size_t l) {
  std::size_t v = 1;
  for (std::size_t k = 0; k < l; ++k) v *= 3;
  return v;
}

/// Grid world crossed from left to right. Entering the rightmost column ends
/// the episode. Composite actions are sequences of L base moves; when fewer
/// than 3^L actions are requested, the sequences at the midpoints of A equal
/// slices are kept (action i -> sequence floor((2i + 1) * 3^L / 2A)).
class MazeEnv {
 public:
  struct State {
    int x = 0;
    int y = 0;
    friend bool operator==(const State&, const State&) = default;
  };

  static constexpr int kWindow = 5;
  static constexpr std::size_t kFeatureDim = 6;  // 4 window counts + normalised (x, y)

  /// `cells` holds row-major penalty class indices (0, 1, 2 -> -1, -10, -100).
  MazeEnv(std::size_t width, std::size_t height, std::vector<std::uint8_t> cells, std::size_t sequence_length = 1,
          std::size_t action_count = 0)
      : width_(width), height_(height), cells_(std::move(cells)), length_(sequence_length) {
    if (width_ < 2 || height_ < 1) throw ConfigError("maze: need width >= 2 and height >= 1");
    if (cells_.size() != width_ * height_) throw ConfigError("maze: cell count != width * height");
    for (auto c : cells_)
      if (c > 2) throw ConfigError("maze: cell class must be 0, 1 or 2");
    if (length_ < 1 || length_ > 8) throw ConfigError("maze: sequence length must be in [1, 8]");
    const std::size_t full = pow3(length_);
    if (action_count == 0) action_count = full;
    if (action_count < 2 || action_count > full)
      throw ConfigError("maze: action count must be in [2, 3^L] = [2, " + std::to_string(full) + "]");
    const auto sequences = all_move_sequences(length_);
    actions_.reserve(action_count);
    for (std::size_t i = 0; i < action_count; ++i) actions_.push_back(sequences[(2 * i + 1) * full / (2 * action_count)]);
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t sequence_length() const noexcept { return length_; }
  std::size_t action_count() const noexcept { return actions_.size(); }
  std::size_t feature_dim() const noexcept { return kFeatureDim; }
  const std::vector<Move>& moves(ActionId a) const { return actions_.at(a.index); }

  int penalty(int x, int y) const { return kMazePenalties[cells_[static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x)]]; }
  std::uint8_t cell_class(int x, int y) const { return cells_[static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x)]; }

  /// Uniform over all cells; cells in the rightmost column are terminal.
  State sample_state(Rng& rng) const {
    const auto idx = uniform_index(rng, width_ * height_);
    return {static_cast<int>(idx % width_), static_cast<int>(idx / width_)};
  }

  bool is_terminal(const State& s) const noexcept { return s.x >= static_cast<int>(width_) - 1; }

  /// Applies the moves in order. A move off the top or bottom leaves the agent
  /// in place and charges the current cell again. Remaining moves are skipped
  /// once the rightmost column is entered.
  Transition<State> step(const State& s, ActionId a, Rng&) const {
    if (a.index >= actions_.size()) throw DomainError("maze: action out of range");
    if (is_terminal(s)) return {s, 0.0, true};
    State cur = s;
    double reward = 0.0;
    for (Move m : actions_[a.index]) {
      if (m == Move::up && cur.y > 0) --cur.y;
      if (m == Move::down && cur.y + 1 < static_cast<int>(height_)) ++cur.y;
      if (m == Move::right) ++cur.x;
      reward += penalty(cur.x, cur.y);
      if (is_terminal(cur)) return {cur, reward, true};
    }
    return {cur, reward, false};
  }

  void features(const State& s, std::span<double> out) const {
    if (out.size() != kFeatureDim) throw DomainError("maze: feature buffer has wrong size");
    std::array<double, 4> counts{};
    for (int dy = -kWindow / 2; dy <= kWindow / 2; ++dy)
      for (int dx = -kWindow / 2; dx <= kWindow / 2; ++dx) {
        const int x = s.x + dx;
        const int y = s.y + dy;
        if (x < 0 || y < 0 || x >= static_cast<int>(width_) || y >= static_cast<int>(height_))
          counts[3] += 1.0;
        else
          counts[cell_class(x, y)] += 1.0;
      }
    for (std::size_t k = 0; k < 4; ++k) out[k] = counts[k];
    out[4] = static_cast<double>(s.x) / static_cast<double>(width_ - 1);
    out[5] = height_ > 1 ? static_cast<double>(s.y) / static_cast<double>(height_ - 1) : 0.0;
  }

  /// Same grid with a different action set.
  MazeEnv with_actions(std::size_t sequence_length, std::size_t action_count = 0) const {
    return MazeEnv(width_, height_, cells_, sequence_length, action_count);
  }

  const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> cells_;
  std::size_t length_;
  std::vector<std::vector<Move>> actions_;
};

inline Transition<MazeEnv::State> maze_transition(const MazeEnv& env, const MazeEnv::State& s, ActionId a, Rng& rng) {
  return env.step(s, a, rng);
}

/// I.i.d. cell penalties; probs are for (-1, -10, -100) and must sum to 1.
inline MazeEnv generate_maze(std::size_t width, std::size_t height, std::array<double, 3> probs, Rng& rng,
                             std::size_t sequence_length = 1, std::size_t action_count = 0) {
  for (double p : probs)
    if (!(p >= 0.0)) throw ConfigError("generate_maze: probabilities must be non-negative");
  if (std::abs(probs[0] + probs[1] + probs[2] - 1.0) > 1e-9) throw ConfigError("generate_maze: probabilities must sum to 1");
  std::vector<std::uint8_t> cells(width * height);
  for (auto& c : cells) {
    const double u = uniform01(rng);
    c = u < probs[0] ? 0 : (u < probs[0] + probs[1] ? 1 : 2);
    if (c == 1 && probs[1] == 0.0) c = probs[2] > 0.0 ? 2 : 0;
    if (c == 2 && probs[2] == 0.0) c = probs[1] > 0.0 ? 1 : 0;
  }
  return MazeEnv(width, height, std::move(cells), sequence_length, action_count);
}

inline constexpr std::array<double, 3> kDefaultMazeProbabilities{0.8, 0.15, 0.05};

/// "W H" then H rows of W glyphs ('.' -1, 'o' -10, 'X' -100).
inline std::string to_text(const MazeEnv& maze) {
  std::string out = std::to_string(maze.width()) + " " + std::to_string(maze.height()) + "\n";
  for (std::size_t y = 0; y < maze.height(); ++y) {
    for (std::size_t x = 0; x < maze.width(); ++x)
      out.push_back(kMazeGlyphs[maze.cell_class(static_cast<int>(x), static_cast<int>(y))]);
    out.push_back('\n');
  }
  return out;
}

inline MazeEnv parse_maze(std::string_view text, std::size_t sequence_length = 1, std::size_t action_count = 0) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || (lines.size() == 1 && lines[0].empty())) throw ParseError(1, 1, "empty maze text");
  const auto [width, height] = detail::parse_header(lines[0], "width", "height");
  if (width < 2 || height < 1) throw ParseError(1, 1, "maze needs width >= 2 and height >= 1");
  std::size_t rows = lines.size() - 1;
  while (rows > height && lines[rows].empty()) --rows;
  if (rows != height)
    throw ParseError(lines.size(), 1, "expected " + std::to_string(height) + " rows, found " + std::to_string(rows));
  std::vector<std::uint8_t> cells;
  cells.reserve(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    const auto row = lines[y + 1];
    if (row.size() != width)
      throw ParseError(y + 2, std::min(row.size(), width) + 1,
                       "row " + std::to_string(y) + " has width " + std::to_string(row.size()) + ", expected " +
                           std::to_string(width));
    for (std::size_t x = 0; x < width; ++x) {
      const char ch = row[x];
      if (ch == '.')
        cells.push_back(0);
      else if (ch == 'o')
        cells.push_back(1);
      else if (ch == 'X')
        cells.push_back(2);
      else
        throw ParseError(y + 2, x + 1, std::string("unknown maze glyph '") + ch + "'");
    }
  }
  return MazeEnv(width, height, std::move(cells), sequence_length, action_count);
}

/// Exact tabular model of a maze (deterministic dynamics), state index y * W + x.
inline TabularMdp tabularize(const MazeEnv& maze, double discount = 1.0) {
  const std::size_t n = maze.width() * maze.height();
  const std::size_t na = maze.action_count();
  std::vector<double> p(n * na * n, 0.0);
  std::vector<double> r(n * na, 0.0);
  std::vector<bool> terminal(n, false);
  Rng unused(0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const MazeEnv::State s{static_cast<int>(idx % maze.width()), static_cast<int>(idx / maze.width())};
    terminal[idx] = maze.is_terminal(s);
    for (std::size_t a = 0; a < na; ++a) {
      if (terminal[idx]) {
        p[(idx * na + a) * n + idx] = 1.0;
        continue;
      }
      const auto tr = maze.step(s, ActionId{a}, unused);
      const std::size_t next = static_cast<std::size_t>(tr.next.y) * maze.width() + static_cast<std::size_t>(tr.next.x);
      p[(idx * na + a) * n + next] = 1.0;
      r[idx * na + a] = tr.reward;
    }
  }
  return TabularMdp(n, na, std::move(p), std::move(r), discount, std::move(terminal));
}

}  // namespace ecoc_rl
