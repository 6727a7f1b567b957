#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecoc_rl/core.hpp"
#include "ecoc_rl/error.hpp"
#include "ecoc_rl/random.hpp"

namespace ecoc_rl {

/// One code word: a sequence of +1 / -1 entries.
using BitVector = std::vector<std::int8_t>;

/// A x C matrix over {+1, -1}; row a is the code of action a, column i is the
/// dichotomy of the action set learned by sub-policy i.
///
/// Construction enforces: rows pairwise distinct, no constant column, no two
/// columns equal or complementary. Rows are stored bit-packed ('+' -> 1) so
/// decoding is a popcount scan.
class CodingMatrix {
 public:
  CodingMatrix(std::size_t action_count, std::size_t code_length, std::span<const std::int8_t> bits)
      : actions_(action_count), length_(code_length), words_((code_length + 63) / 64) {
    if (action_count < 2) throw DomainError("coding matrix: need at least 2 actions");
    if (code_length < 1) throw DomainError("coding matrix: need at least 1 bit");
    if (bits.size() != action_count * code_length) throw DomainError("coding matrix: bit count != A * C");
    packed_.assign(actions_ * words_, 0);
    for (std::size_t a = 0; a < actions_; ++a) {
      for (std::size_t i = 0; i < length_; ++i) {
        const auto b = bits[a * length_ + i];
        if (b != 1 && b != -1) throw DomainError("coding matrix: entries must be +1 or -1");
        if (b == 1) packed_[a * words_ + i / 64] |= std::uint64_t{1} << (i % 64);
      }
    }
    check_columns();
    min_distance_ = compute_min_distance();
    if (min_distance_ == 0) throw DomainError("coding matrix: two actions share a code");
  }

  /// Builds from rows of '+' / '-' characters.
  static CodingMatrix from_rows(const std::vector<std::string>& rows) {
    if (rows.empty()) throw DomainError("coding matrix: no rows");
    const std::size_t c = rows.front().size();
    BitVector bits;
    bits.reserve(rows.size() * c);
    for (const auto& row : rows) {
      if (row.size() != c) throw DomainError("coding matrix: ragged rows");
      for (char ch : row) {
        if (ch != '+' && ch != '-') throw DomainError("coding matrix: row characters must be '+' or '-'");
        bits.push_back(ch == '+' ? 1 : -1);
      }
    }
    return CodingMatrix(rows.size(), c, bits);
  }

  std::size_t action_count() const noexcept { return actions_; }
  std::size_t code_length() const noexcept { return length_; }
  std::size_t words_per_row() const noexcept { return words_; }
  std::size_t min_distance() const noexcept { return min_distance_; }

  /// +1 or -1.
  int bit(std::size_t action, std::size_t i) const {
    if (action >= actions_ || i >= length_) throw DomainError("coding matrix: index out of range");
    return ((packed_[action * words_ + i / 64] >> (i % 64)) & 1U) != 0 ? 1 : -1;
  }

  BitVector row(std::size_t action) const {
    BitVector out(length_);
    for (std::size_t i = 0; i < length_; ++i) out[i] = static_cast<std::int8_t>(bit(action, i));
    return out;
  }

  std::span<const std::uint64_t> packed_row(std::size_t action) const {
    return {packed_.data() + action * words_, words_};
  }

  /// Nearest row to a packed query; ties go to the lowest action index.
  ActionId decode_packed(std::span<const std::uint64_t> query) const {
    std::size_t best = 0;
    std::size_t best_dist = std::numeric_limits<std::size_t>::max();
    for (std::size_t a = 0; a < actions_; ++a) {
      const std::uint64_t* row = packed_.data() + a * words_;
      std::size_t d = 0;
      for (std::size_t w = 0; w < words_; ++w) d += static_cast<std::size_t>(std::popcount(row[w] ^ query[w]));
      if (d < best_dist) {
        best_dist = d;
        best = a;
      }
    }
    return ActionId{best};
  }

  friend bool operator==(const CodingMatrix& lhs, const CodingMatrix& rhs) {
    return lhs.actions_ == rhs.actions_ && lhs.length_ == rhs.length_ && lhs.packed_ == rhs.packed_;
  }

 private:
  std::vector<std::uint64_t> column_bits(std::size_t i) const {
    std::vector<std::uint64_t> col((actions_ + 63) / 64, 0);
    for (std::size_t a = 0; a < actions_; ++a)
      if ((packed_[a * words_ + i / 64] >> (i % 64)) & 1U) col[a / 64] |= std::uint64_t{1} << (a % 64);
    return col;
  }

  void check_columns() const {
    std::vector<std::vector<std::uint64_t>> cols;
    cols.reserve(length_);
    const std::size_t col_words = (actions_ + 63) / 64;
    for (std::size_t i = 0; i < length_; ++i) {
      auto col = column_bits(i);
      std::size_t ones = 0;
      for (auto w : col) ones += static_cast<std::size_t>(std::popcount(w));
      if (ones == 0 || ones == actions_) throw DomainError("coding matrix: column " + std::to_string(i) + " is constant");
      for (std::size_t j = 0; j < cols.size(); ++j) {
        bool equal = true;
        bool complement = true;
        for (std::size_t w = 0; w < col_words; ++w) {
          const std::size_t used = std::min<std::size_t>(64, actions_ - w * 64);
          const std::uint64_t mask = used == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << used) - 1);
          equal = equal && ((col[w] ^ cols[j][w]) & mask) == 0;
          complement = complement && ((col[w] ^ ~cols[j][w]) & mask) == 0;
        }
        if (equal || complement)
          throw DomainError("coding matrix: columns " + std::to_string(j) + " and " + std::to_string(i) +
                            (equal ? " are identical" : " are complementary"));
      }
      cols.push_back(std::move(col));
    }
  }

  std::size_t compute_min_distance() const {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t a = 0; a < actions_; ++a) {
      for (std::size_t b = a + 1; b < actions_; ++b) {
        std::size_t d = 0;
        for (std::size_t w = 0; w < words_; ++w)
          d += static_cast<std::size_t>(std::popcount(packed_[a * words_ + w] ^ packed_[b * words_ + w]));
        best = std::min(best, d);
      }
    }
    return best;
  }

  std::size_t actions_;
  std::size_t length_;
  std::size_t words_;
  std::vector<std::uint64_t> packed_;
  std::size_t min_distance_ = 0;
};

/// Largest code length for which the column constraints can hold:
/// 2^A - 2 non-constant columns, paired up by complement.
inline std::size_t max_code_length(std::size_t actions) {
  if (actions < 2) return 0;
  if (actions >= 64) return std::numeric_limits<std::size_t>::max();
  return (std::size_t{1} << (actions - 1)) - 1;
}

inline std::size_t min_code_length(std::size_t actions) {
  return actions < 2 ? 0 : static_cast<std::size_t>(std::bit_width(actions - 1));
}

/// C = max(round(redundancy * ln A), ceil(log2 A)), capped at the number of
/// admissible columns for tiny A (A=2 can only ever carry one bit).
inline std::size_t code_length(std::size_t actions, double redundancy) {
  if (actions < 2) throw DomainError("code_length: need at least 2 actions");
  if (!(redundancy >= 1.0)) throw DomainError("code_length: redundancy must be >= 1");
  const auto scaled = static_cast<std::size_t>(std::llround(redundancy * std::log(static_cast<double>(actions))));
  return std::min(std::max(scaled, min_code_length(actions)), max_code_length(actions));
}

/// Random A x C coding matrix: best of `max_retries` valid draws by minimum
/// row distance (first best wins). Each draw builds columns one at a time,
/// rejecting constant, repeated and complementary columns, then rejects the
/// whole draw if two rows coincide.
inline CodingMatrix generate_random_matrix(std::size_t actions, std::size_t length, Rng& rng,
                                           std::size_t max_retries = 50) {
  if (actions < 2) throw GenerationError("generate_random_matrix: need at least 2 actions");
  if (length < min_code_length(actions))
    throw GenerationError("generate_random_matrix: " + std::to_string(length) + " bits cannot separate " +
                          std::to_string(actions) + " actions");
  if (length > max_code_length(actions))
    throw GenerationError("generate_random_matrix: at most " + std::to_string(max_code_length(actions)) +
                          " admissible columns exist for " + std::to_string(actions) + " actions");
  if (max_retries == 0) throw GenerationError("generate_random_matrix: max_retries must be >= 1");

  const std::size_t col_words = (actions + 63) / 64;
  const std::size_t tail = actions % 64;
  const std::uint64_t tail_mask = tail == 0 ? ~std::uint64_t{0} : ((std::uint64_t{1} << tail) - 1);
  // Columns are canonicalised so that action 0 carries a 1: equal and
  // complementary columns then share one canonical form.
  auto canonical = [&](std::vector<std::uint64_t> col) {
    if ((col[0] & 1U) == 0) {
      for (auto& w : col) w = ~w;
      col.back() &= tail_mask;
    }
    return col;
  };
  const std::size_t column_budget = 200 + 20 * length;

  // Short codes: random column draws almost always repeat a row, so draw
  // distinct rows instead and reject bad columns. Both schemes are uniform
  // over valid matrices.
  const bool rows_first = length < 2 * min_code_length(actions) && length <= 24;
  auto draw_rows_first = [&]() -> std::vector<std::vector<std::uint64_t>> {
    const std::uint64_t space = std::uint64_t{1} << length;
    std::vector<std::uint64_t> rows;
    rows.reserve(actions);
    while (rows.size() < actions) {
      const std::uint64_t r = uniform_index(rng, space);
      if (std::find(rows.begin(), rows.end(), r) == rows.end()) rows.push_back(r);
    }
    std::vector<std::vector<std::uint64_t>> cols, seen;
    for (std::size_t i = 0; i < length; ++i) {
      std::vector<std::uint64_t> col(col_words, 0);
      for (std::size_t a = 0; a < actions; ++a)
        if ((rows[a] >> i) & 1U) col[a / 64] |= std::uint64_t{1} << (a % 64);
      auto key = canonical(col);
      std::size_t ones = 0;
      for (auto w : key) ones += static_cast<std::size_t>(std::popcount(w));
      if (ones == actions || std::find(seen.begin(), seen.end(), key) != seen.end()) return {};
      seen.push_back(std::move(key));
      cols.push_back(std::move(col));
    }
    return cols;
  };

  std::vector<std::int8_t> best_bits;
  std::size_t best_dmin = 0;
  for (std::size_t attempt = 0; attempt < max_retries; ++attempt) {
    if (rows_first) {
      std::vector<std::vector<std::uint64_t>> cols;
      for (std::size_t k = 0; k < column_budget && cols.empty(); ++k) cols = draw_rows_first();
      if (cols.empty()) continue;
      std::vector<std::int8_t> bits(actions * length);
      for (std::size_t i = 0; i < length; ++i)
        for (std::size_t a = 0; a < actions; ++a)
          bits[a * length + i] = static_cast<std::int8_t>(((cols[i][a / 64] >> (a % 64)) & 1U) ? 1 : -1);
      const std::size_t dmin = CodingMatrix(actions, length, bits).min_distance();
      if (best_bits.empty() || dmin > best_dmin) {
        best_bits = std::move(bits);
        best_dmin = dmin;
      }
      continue;
    }
    std::vector<std::vector<std::uint64_t>> cols;
    cols.reserve(length);
    std::size_t draws = 0;
    while (cols.size() < length && draws < column_budget * length) {
      ++draws;
      std::vector<std::uint64_t> col(col_words);
      for (auto& w : col) w = rng();
      col.back() &= tail_mask;
      col = canonical(std::move(col));
      std::size_t ones = 0;
      for (auto w : col) ones += static_cast<std::size_t>(std::popcount(w));
      if (ones == actions) continue;  // canonical form of a constant column
      if (std::find(cols.begin(), cols.end(), col) != cols.end()) continue;
      cols.push_back(std::move(col));
    }
    if (cols.size() < length) continue;
    // Column canonicalisation flips whole columns, which would bias action 0;
    // a random sign per column undoes that without affecting validity.
    std::vector<std::int8_t> bits(actions * length);
    for (std::size_t i = 0; i < length; ++i) {
      const bool flip = (rng() >> 63) != 0;
      for (std::size_t a = 0; a < actions; ++a) {
        const bool one = ((cols[i][a / 64] >> (a % 64)) & 1U) != 0;
        bits[a * length + i] = static_cast<std::int8_t>((one != flip) ? 1 : -1);
      }
    }
    std::size_t dmin = std::numeric_limits<std::size_t>::max();
    bool rows_distinct = true;
    for (std::size_t a = 0; a < actions && rows_distinct; ++a) {
      for (std::size_t b = a + 1; b < actions; ++b) {
        std::size_t d = 0;
        for (std::size_t i = 0; i < length; ++i) d += bits[a * length + i] != bits[b * length + i] ? 1 : 0;
        if (d == 0) {
          rows_distinct = false;
          break;
        }
        dmin = std::min(dmin, d);
      }
    }
    if (!rows_distinct) continue;
    if (best_bits.empty() || dmin > best_dmin) {
      best_bits = std::move(bits);
      best_dmin = dmin;
    }
  }
  if (best_bits.empty())
    throw GenerationError("generate_random_matrix: no valid " + std::to_string(actions) + "x" +
                          std::to_string(length) + " matrix after " + std::to_string(max_retries) + " draws");
  return CodingMatrix(actions, length, best_bits);
}

inline std::vector<std::uint64_t> pack_bits(std::span<const std::int8_t> bits) {
  std::vector<std::uint64_t> packed((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == 1)
      packed[i / 64] |= std::uint64_t{1} << (i % 64);
    else if (bits[i] != -1)
      throw DomainError("bit vector entries must be +1 or -1");
  }
  return packed;
}

/// Action whose code is nearest in Hamming distance; lowest index on ties.
inline ActionId hamming_decode(const CodingMatrix& m, std::span<const std::int8_t> bits) {
  if (bits.size() != m.code_length())
    throw DomainError("hamming_decode: got " + std::to_string(bits.size()) + " bits, matrix has " +
                      std::to_string(m.code_length()));
  return m.decode_packed(pack_bits(bits));
}

inline std::size_t hamming_distance(std::span<const std::int8_t> lhs, std::span<const std::int8_t> rhs) {
  if (lhs.size() != rhs.size()) throw DomainError("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i) d += lhs[i] != rhs[i] ? 1 : 0;
  return d;
}

struct ColumnSplit {
  std::vector<ActionId> positive;
  std::vector<ActionId> negative;
};

inline ColumnSplit column_split(const CodingMatrix& m, std::size_t i) {
  if (i >= m.code_length()) throw DomainError("column_split: bit index out of range");
  ColumnSplit split;
  for (std::size_t a = 0; a < m.action_count(); ++a) (m.bit(a, i) > 0 ? split.positive : split.negative).push_back({a});
  return split;
}

/// "A C\n" followed by A newline-terminated rows of '+' / '-'.
inline std::string to_text(const CodingMatrix& m) {
  std::string out = std::to_string(m.action_count()) + " " + std::to_string(m.code_length()) + "\n";
  out.reserve(out.size() + m.action_count() * (m.code_length() + 1));
  for (std::size_t a = 0; a < m.action_count(); ++a) {
    for (std::size_t i = 0; i < m.code_length(); ++i) out.push_back(m.bit(a, i) > 0 ? '+' : '-');
    out.push_back('\n');
  }
  return out;
}

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::size_t parse_count(std::string_view token, std::size_t line, std::size_t column, const char* what) {
  if (token.empty()) throw ParseError(line, column, std::string("missing ") + what);
  std::size_t value = 0;
  for (std::size_t k = 0; k < token.size(); ++k) {
    const char ch = token[k];
    if (ch < '0' || ch > '9') throw ParseError(line, column + k, std::string("invalid ") + what);
    value = value * 10 + static_cast<std::size_t>(ch - '0');
    if (value > 1000000) throw ParseError(line, column, std::string(what) + " too large");
  }
  return value;
}

/// Splits "X Y" into two whitespace-separated integer fields.
inline std::pair<std::size_t, std::size_t> parse_header(std::string_view line, const char* first, const char* second) {
  std::size_t p = 0;
  auto skip_ws = [&] {
    while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) ++p;
  };
  auto token = [&]() -> std::pair<std::string_view, std::size_t> {
    skip_ws();
    const std::size_t begin = p;
    while (p < line.size() && line[p] != ' ' && line[p] != '\t') ++p;
    return {line.substr(begin, p - begin), begin + 1};
  };
  auto [t1, c1] = token();
  const std::size_t v1 = parse_count(t1, 1, c1, first);
  auto [t2, c2] = token();
  const std::size_t v2 = parse_count(t2, 1, c2, second);
  skip_ws();
  if (p != line.size()) throw ParseError(1, p + 1, "trailing characters in header");
  return {v1, v2};
}

}  // namespace detail

inline CodingMatrix parse_coding_matrix(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || (lines.size() == 1 && lines[0].empty())) throw ParseError(1, 1, "empty coding matrix text");
  const auto [actions, length] = detail::parse_header(lines[0], "action count", "code length");
  if (actions < 2) throw ParseError(1, 1, "action count must be >= 2");
  if (length < 1) throw ParseError(1, 1, "code length must be >= 1");
  std::size_t rows = lines.size() - 1;
  while (rows > actions && lines[rows].empty()) --rows;  // tolerate trailing blank lines
  if (rows != actions)
    throw ParseError(lines.size(), 1,
                     "expected " + std::to_string(actions) + " rows, found " + std::to_string(rows));
  BitVector bits;
  bits.reserve(actions * length);
  for (std::size_t a = 0; a < actions; ++a) {
    const std::string_view row = lines[a + 1];
    const std::size_t line_no = a + 2;
    if (row.size() != length)
      throw ParseError(line_no, std::min(row.size(), length) + 1,
                       "row " + std::to_string(a) + " has width " + std::to_string(row.size()) + ", expected " +
                           std::to_string(length));
    for (std::size_t i = 0; i < length; ++i) {
      if (row[i] != '+' && row[i] != '-')
        throw ParseError(line_no, i + 1, "row " + std::to_string(a) + ": expected '+' or '-'");
      bits.push_back(row[i] == '+' ? 1 : -1);
    }
  }
  return CodingMatrix(actions, length, bits);
}

}  // namespace ecoc_rl
