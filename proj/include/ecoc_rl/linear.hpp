#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include <Eigen/Core>

#include "ecoc_rl/error.hpp"
#include "ecoc_rl/random.hpp"

namespace ecoc_rl {

namespace detail {

using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

inline ConstVecMap as_eigen(std::span<const double> v) {
  return ConstVecMap(v.data(), static_cast<Eigen::Index>(v.size()));
}
inline VecMap as_eigen(std::span<double> v) { return VecMap(v.data(), static_cast<Eigen::Index>(v.size())); }

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& token) {
  double value = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw ParseError(0, 0, "invalid number '" + token + "'");
  return value;
}

}  // namespace detail

/// Per-dimension standardisation x -> (x - mean) / stddev. Dimensions that
/// were constant in the fitting data keep stddev 1.
class FeatureScaler {
 public:
  FeatureScaler() = default;
  FeatureScaler(std::vector<double> mean, std::vector<double> stddev) : mean_(std::move(mean)), stddev_(std::move(stddev)) {
    if (mean_.size() != stddev_.size()) throw DomainError("feature scaler: mean/stddev size mismatch");
    if (!detail::all_finite(mean_) || !detail::all_finite(stddev_)) throw DomainError("feature scaler: non-finite statistics");
    for (double s : stddev_)
      if (!(s > 0.0)) throw DomainError("feature scaler: stddev must be positive");
  }

  static FeatureScaler identity(std::size_t dim) { return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}; }

  /// Fits on `rows` row-major samples of dimension `dim`.
  static FeatureScaler fit(std::span<const double> rows, std::size_t dim) {
    const std::size_t n = dim == 0 ? 0 : rows.size() / dim;
    std::vector<double> mean(dim, 0.0);
    std::vector<double> stddev(dim, 1.0);
    if (n == 0) return {mean, stddev};
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < dim; ++j) mean[j] += rows[r * dim + j];
    for (auto& m : mean) m /= static_cast<double>(n);
    std::vector<double> var(dim, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < dim; ++j) {
        const double d = rows[r * dim + j] - mean[j];
        var[j] += d * d;
      }
    for (std::size_t j = 0; j < dim; ++j) {
      const double s = std::sqrt(var[j] / static_cast<double>(n));
      stddev[j] = s > 1e-12 ? s : 1.0;
    }
    return {mean, stddev};
  }

  std::size_t dim() const noexcept { return mean_.size(); }
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& stddev() const noexcept { return stddev_; }

  void transform(std::span<const double> in, std::span<double> out) const {
    if (in.size() != dim() || out.size() != dim()) throw DomainError("feature scaler: dimension mismatch");
    for (std::size_t j = 0; j < dim(); ++j) out[j] = (in[j] - mean_[j]) / stddev_[j];
  }

  friend bool operator==(const FeatureScaler&, const FeatureScaler&) = default;

 private:
  std::vector<double> mean_;
  std::vector<double> stddev_;
};

/// Binary linear scorer f(x) = w . standardize(x) + b.
///
/// The scaler is folded into an equivalent raw-space weight vector at
/// construction so that scoring is a single dot product.
class LinearClassifier {
 public:
  LinearClassifier() = default;

  LinearClassifier(std::vector<double> weights, double bias, FeatureScaler scaler, bool single_class = false)
      : weights_(std::move(weights)), bias_(bias), scaler_(std::move(scaler)), single_class_(single_class) {
    if (scaler_.dim() != weights_.size()) throw DomainError("linear classifier: scaler dimension mismatch");
    if (!detail::all_finite(weights_) || !std::isfinite(bias_)) throw DomainError("linear classifier: non-finite parameters");
    fold();
  }

  LinearClassifier(std::vector<double> weights, double bias)
      : LinearClassifier(weights, bias, FeatureScaler::identity(weights.size())) {}

  /// Scores every input as `label` (+1 or -1); the fallback for one-class data.
  static LinearClassifier constant(std::size_t dim, int label) {
    return LinearClassifier(std::vector<double>(dim, 0.0), label > 0 ? 1.0 : -1.0, FeatureScaler::identity(dim), true);
  }

  std::size_t dim() const noexcept { return weights_.size(); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  const FeatureScaler& scaler() const noexcept { return scaler_; }
  bool single_class() const noexcept { return single_class_; }

  /// Raw-space weights and bias: score(x) == effective_weights() . x + effective_bias().
  std::span<const double> effective_weights() const noexcept { return folded_; }
  double effective_bias() const noexcept { return folded_bias_; }

  double score(std::span<const double> x) const {
    if (x.size() != dim())
      throw DomainError("score: feature dimension " + std::to_string(x.size()) + " != " + std::to_string(dim()));
    return detail::as_eigen(std::span<const double>(folded_)).dot(detail::as_eigen(x)) + folded_bias_;
  }

  int predict(std::span<const double> x) const { return score(x) >= 0.0 ? 1 : -1; }

  friend bool operator==(const LinearClassifier& lhs, const LinearClassifier& rhs) {
    return lhs.weights_ == rhs.weights_ && lhs.bias_ == rhs.bias_ && lhs.scaler_ == rhs.scaler_ &&
           lhs.single_class_ == rhs.single_class_;
  }

 private:
  void fold() {
    folded_.resize(weights_.size());
    folded_bias_ = bias_;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
      folded_[j] = weights_[j] / scaler_.stddev()[j];
      folded_bias_ -= folded_[j] * scaler_.mean()[j];
    }
  }

  std::vector<double> weights_;
  double bias_ = 0.0;
  FeatureScaler scaler_;
  bool single_class_ = false;
  std::vector<double> folded_;
  double folded_bias_ = 0.0;
};

inline double score(const LinearClassifier& c, std::span<const double> x) { return c.score(x); }

/// Row-major feature matrix with +1 / -1 labels.
class LabeledSet {
 public:
  explicit LabeledSet(std::size_t dim) : dim_(dim) {}

  void add(std::span<const double> features, int label) {
    if (features.size() != dim_) throw DomainError("labeled set: feature dimension mismatch");
    if (label != 1 && label != -1) throw DomainError("labeled set: labels must be +1 or -1");
    features_.insert(features_.end(), features.begin(), features.end());
    labels_.push_back(label);
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::span<const double> features() const noexcept { return features_; }
  std::span<const double> row(std::size_t i) const { return {features_.data() + i * dim_, dim_}; }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const noexcept { return labels_; }

 private:
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<int> labels_;
};

/// max(0, 1 - y (w . x + b))
inline double hinge_loss(std::span<const double> w, double b, std::span<const double> x, int y) {
  const double f = detail::as_eigen(w).dot(detail::as_eigen(x)) + b;
  return std::max(0.0, 1.0 - static_cast<double>(y) * f);
}

/// One SGD step on the hinge loss: when the margin is violated,
/// (w, b) += rate * y * (x, 1). Returns whether an update happened.
inline bool hinge_sgd_step(std::span<double> w, double& b, std::span<const double> x, int y, double rate) {
  const double f = detail::as_eigen(std::span<const double>(w.data(), w.size())).dot(detail::as_eigen(x)) + b;
  const double yd = static_cast<double>(y);
  if (yd * f >= 1.0) return false;
  detail::as_eigen(w) += (rate * yd) * detail::as_eigen(x);
  b += rate * yd;
  return true;
}

struct TrainOptions {
  std::size_t epochs = 1000;
  double initial_rate = 0.1;  // eta_t = initial_rate / sqrt(t), t counts updates attempted
  bool standardize = true;
};

/// Hinge-loss perceptron trained by SGD over `epochs` shuffled passes.
///
/// One-class data yields LinearClassifier::constant(label); its
/// single_class() flag is the diagnostic.
inline LinearClassifier train(const LabeledSet& data, const TrainOptions& opts, Rng& rng) {
  if (data.empty()) throw TrainingError("train: empty training set");
  if (!(opts.initial_rate > 0.0)) throw ConfigError("train: learning rate must be positive");
  const auto labels = data.labels();
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
  if (!has_pos || !has_neg) return LinearClassifier::constant(data.dim(), has_pos ? 1 : -1);

  const std::size_t n = data.size();
  const std::size_t dim = data.dim();
  FeatureScaler scaler = opts.standardize ? FeatureScaler::fit(data.features(), dim) : FeatureScaler::identity(dim);
  std::vector<double> x(data.features().begin(), data.features().end());
  if (opts.standardize)
    for (std::size_t i = 0; i < n; ++i) {
      std::span<double> r(x.data() + i * dim, dim);
      scaler.transform(std::span<const double>(r.data(), dim), r);
    }

  std::vector<double> w(dim, 0.0);
  double b = 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t i : order) {
      ++t;
      const double rate = opts.initial_rate / std::sqrt(static_cast<double>(t));
      hinge_sgd_step(w, b, std::span<const double>(x.data() + i * dim, dim), data.label(i), rate);
    }
  }
  return LinearClassifier(std::move(w), b, std::move(scaler));
}

/// Versioned text blob; doubles use the shortest exact representation, so
/// write -> read reproduces the classifier bit for bit.
inline void write_classifier(std::ostream& os, const LinearClassifier& c) {
  os << "linear-classifier v1\n";
  os << "dim " << c.dim() << "\n";
  os << "single_class " << (c.single_class() ? 1 : 0) << "\n";
  os << "bias " << detail::format_double(c.bias()) << "\n";
  auto line = [&](const char* name, const std::vector<double>& v) {
    os << name;
    for (double x : v) os << ' ' << detail::format_double(x);
    os << "\n";
  };
  line("weights", c.weights());
  line("mean", c.scaler().mean());
  line("stddev", c.scaler().stddev());
}

inline LinearClassifier read_classifier(std::istream& is) {
  auto expect = [&](const char* word) {
    std::string token;
    if (!(is >> token) || token != word) throw ParseError(0, 0, std::string("classifier: expected '") + word + "'");
  };
  expect("linear-classifier");
  expect("v1");
  expect("dim");
  std::size_t dim = 0;
  if (!(is >> dim)) throw ParseError(0, 0, "classifier: bad dimension");
  expect("single_class");
  int single = 0;
  if (!(is >> single)) throw ParseError(0, 0, "classifier: bad single_class flag");
  auto read_number = [&] {
    std::string token;
    if (!(is >> token)) throw ParseError(0, 0, "classifier: truncated");
    return detail::parse_double(token);
  };
  expect("bias");
  const double bias = read_number();
  auto read_vector = [&](const char* name) {
    expect(name);
    std::vector<double> v(dim);
    for (auto& x : v) x = read_number();
    return v;
  };
  auto weights = read_vector("weights");
  auto mean = read_vector("mean");
  auto stddev = read_vector("stddev");
  return LinearClassifier(std::move(weights), bias, FeatureScaler(std::move(mean), std::move(stddev)), single != 0);
}

}  // namespace ecoc_rl
