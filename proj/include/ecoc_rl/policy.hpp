#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ecoc_rl/core.hpp"
#include "ecoc_rl/ecoc.hpp"
#include "ecoc_rl/error.hpp"
#include "ecoc_rl/linear.hpp"
#include "ecoc_rl/random.hpp"

namespace ecoc_rl {

using PolicyPtr = std::shared_ptr<const Policy>;

namespace detail {

/// Classifiers stacked into one row-major matrix of raw-space weights.
class StackedScorer {
 public:
  StackedScorer() = default;

  explicit StackedScorer(const std::vector<LinearClassifier>& classifiers) {
    if (classifiers.empty()) return;
    const std::size_t dim = classifiers.front().dim();
    weights_.resize(static_cast<Eigen::Index>(classifiers.size()), static_cast<Eigen::Index>(dim));
    bias_.resize(static_cast<Eigen::Index>(classifiers.size()));
    for (std::size_t k = 0; k < classifiers.size(); ++k) {
      if (classifiers[k].dim() != dim) throw DomainError("policy: classifiers disagree on feature dimension");
      const auto w = classifiers[k].effective_weights();
      for (std::size_t j = 0; j < dim; ++j) weights_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = w[j];
      bias_(static_cast<Eigen::Index>(k)) = classifiers[k].effective_bias();
    }
  }

  std::size_t rows() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(weights_.cols()); }

  void check(std::span<const double> x) const {
    if (x.size() != dim())
      throw DomainError("policy: feature dimension " + std::to_string(x.size()) + " != " + std::to_string(dim()));
  }

  double score(std::size_t k, std::span<const double> x) const {
    return weights_.row(static_cast<Eigen::Index>(k)).dot(as_eigen(x).transpose()) + bias_(static_cast<Eigen::Index>(k));
  }

 private:
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> weights_;
  Eigen::VectorXd bias_;
};

}  // namespace detail

/// Uniform over [0, A); ignores features.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::size_t action_count) : actions_(action_count) {
    if (action_count < 1) throw DomainError("random policy: need at least one action");
  }

  std::size_t action_count() const override { return actions_; }
  ActionId act(std::span<const double>, Rng& rng) const override { return ActionId{uniform_index(rng, actions_)}; }
  bool uses_features() const override { return false; }

 private:
  std::size_t actions_;
};

inline ActionId random_act(std::size_t action_count, Rng& rng) {
  if (action_count < 1) throw DomainError("random_act: need at least one action");
  return ActionId{uniform_index(rng, action_count)};
}

/// One-vs-all: one classifier per action, act = argmax of scores (lowest index on ties).
class OvaPolicy final : public Policy {
 public:
  explicit OvaPolicy(std::vector<LinearClassifier> classifiers)
      : classifiers_(std::move(classifiers)), scorer_(classifiers_) {
    if (classifiers_.size() < 1) throw DomainError("ova policy: need at least one classifier");
  }

  std::size_t action_count() const override { return classifiers_.size(); }

  ActionId act(std::span<const double> features, Rng&) const override { return decide(features); }

  ActionId decide(std::span<const double> features) const {
    scorer_.check(features);
    std::size_t best = 0;
    double best_score = scorer_.score(0, features);
    for (std::size_t a = 1; a < classifiers_.size(); ++a) {
      const double s = scorer_.score(a, features);
      if (s > best_score) {
        best_score = s;
        best = a;
      }
    }
    return ActionId{best};
  }

  const std::vector<LinearClassifier>& classifiers() const noexcept { return classifiers_; }

 private:
  std::vector<LinearClassifier> classifiers_;
  detail::StackedScorer scorer_;
};

/// Sign of one classifier: action 0 stands for bit '+', action 1 for bit '-'.
class BinarySubPolicy final : public Policy {
 public:
  static constexpr ActionId kPositive{0};
  static constexpr ActionId kNegative{1};

  explicit BinarySubPolicy(LinearClassifier classifier) : classifier_(std::move(classifier)) {}

  std::size_t action_count() const override { return 2; }

  /// +1 or -1; a zero score maps to +1.
  int bit(std::span<const double> features) const { return classifier_.score(features) >= 0.0 ? 1 : -1; }

  ActionId act(std::span<const double> features, Rng&) const override {
    return bit(features) > 0 ? kPositive : kNegative;
  }

  const LinearClassifier& classifier() const noexcept { return classifier_; }

 private:
  LinearClassifier classifier_;
};

/// C bit classifiers decoded to the action with the nearest code.
class EcocPolicy final : public Policy {
 public:
  EcocPolicy(CodingMatrix matrix, std::vector<LinearClassifier> classifiers)
      : matrix_(std::move(matrix)), classifiers_(std::move(classifiers)), scorer_(classifiers_) {
    if (classifiers_.size() != matrix_.code_length())
      throw DomainError("ecoc policy: " + std::to_string(classifiers_.size()) + " classifiers for a " +
                        std::to_string(matrix_.code_length()) + "-bit code");
  }

  std::size_t action_count() const override { return matrix_.action_count(); }

  ActionId act(std::span<const double> features, Rng&) const override { return decide(features); }

  ActionId decide(std::span<const double> features) const {
    scorer_.check(features);
    const std::size_t words = matrix_.words_per_row();
    std::array<std::uint64_t, 4> small{};
    std::vector<std::uint64_t> large;
    std::span<std::uint64_t> query;
    if (words <= small.size()) {
      query = std::span<std::uint64_t>(small.data(), words);
    } else {
      large.assign(words, 0);
      query = large;
    }
    for (std::size_t i = 0; i < classifiers_.size(); ++i)
      if (scorer_.score(i, features) >= 0.0) query[i / 64] |= std::uint64_t{1} << (i % 64);
    return matrix_.decode_packed(query);
  }

  /// The concatenated sub-policy outputs (pi_1(s), ..., pi_C(s)).
  BitVector bits(std::span<const double> features) const {
    scorer_.check(features);
    BitVector out(classifiers_.size());
    for (std::size_t i = 0; i < classifiers_.size(); ++i) out[i] = scorer_.score(i, features) >= 0.0 ? 1 : -1;
    return out;
  }

  const CodingMatrix& matrix() const noexcept { return matrix_; }
  const std::vector<LinearClassifier>& classifiers() const noexcept { return classifiers_; }

 private:
  CodingMatrix matrix_;
  std::vector<LinearClassifier> classifiers_;
  detail::StackedScorer scorer_;
};

/// Per-decision mixture: the old policy with probability alpha, else the new one.
class AlphaMixturePolicy final : public Policy {
 public:
  AlphaMixturePolicy(PolicyPtr old_policy, PolicyPtr new_policy, double alpha)
      : old_(std::move(old_policy)), new_(std::move(new_policy)), alpha_(alpha) {
    if (!old_ || !new_) throw DomainError("mixture policy: null component");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("mixture policy: alpha must be in [0, 1]");
    if (old_->action_count() != new_->action_count()) throw DomainError("mixture policy: action counts differ");
  }

  std::size_t action_count() const override { return old_->action_count(); }

  ActionId act(std::span<const double> features, Rng& rng) const override {
    return uniform01(rng) < alpha_ ? old_->act(features, rng) : new_->act(features, rng);
  }

  bool uses_features() const override { return old_->uses_features() || new_->uses_features(); }

  double alpha() const noexcept { return alpha_; }
  const PolicyPtr& old_policy() const noexcept { return old_; }
  const PolicyPtr& new_policy() const noexcept { return new_; }

 private:
  PolicyPtr old_;
  PolicyPtr new_;
  double alpha_;
};

inline ActionId ova_act(const OvaPolicy& p, std::span<const double> features) { return p.decide(features); }
inline ActionId ecoc_act(const EcocPolicy& p, std::span<const double> features) { return p.decide(features); }
inline ActionId mixture_act(const AlphaMixturePolicy& p, std::span<const double> features, Rng& rng) {
  return p.act(features, rng);
}

// Policy bundles: a checkpoint of a classifier-backed policy.
//
//   ecoc-rl-policy v1
//   kind ova|ecoc|binary
//   [coding matrix text, ecoc only]
//   classifiers N
//   N classifier blobs

inline void write_policy_bundle(std::ostream& os, const Policy& policy) {
  const std::vector<LinearClassifier>* classifiers = nullptr;
  std::vector<LinearClassifier> single;
  os << "ecoc-rl-policy v1\n";
  if (const auto* ova = dynamic_cast<const OvaPolicy*>(&policy)) {
    os << "kind ova\n";
    classifiers = &ova->classifiers();
  } else if (const auto* ecoc = dynamic_cast<const EcocPolicy*>(&policy)) {
    os << "kind ecoc\n" << to_text(ecoc->matrix());
    classifiers = &ecoc->classifiers();
  } else if (const auto* bin = dynamic_cast<const BinarySubPolicy*>(&policy)) {
    os << "kind binary\n";
    single.push_back(bin->classifier());
    classifiers = &single;
  } else {
    throw DomainError("write_policy_bundle: only classifier-backed policies can be checkpointed");
  }
  os << "classifiers " << classifiers->size() << "\n";
  for (const auto& c : *classifiers) write_classifier(os, c);
}

inline std::string policy_bundle_text(const Policy& policy) {
  std::ostringstream os;
  write_policy_bundle(os, policy);
  return os.str();
}

inline PolicyPtr read_policy_bundle(std::istream& is) {
  std::string word, version, kind;
  if (!(is >> word >> version) || word != "ecoc-rl-policy" || version != "v1")
    throw ParseError(1, 1, "policy bundle: bad header");
  if (!(is >> word >> kind) || word != "kind") throw ParseError(2, 1, "policy bundle: missing kind");
  std::optional<CodingMatrix> matrix;
  if (kind == "ecoc") {
    std::size_t actions = 0, length = 0;
    if (!(is >> actions >> length)) throw ParseError(3, 1, "policy bundle: bad matrix header");
    std::string text = std::to_string(actions) + " " + std::to_string(length) + "\n";
    for (std::size_t a = 0; a < actions; ++a) {
      std::string row;
      if (!(is >> row)) throw ParseError(4 + a, 1, "policy bundle: truncated matrix");
      text += row + "\n";
    }
    matrix = parse_coding_matrix(text);
  } else if (kind != "ova" && kind != "binary") {
    throw ParseError(2, 6, "policy bundle: unknown kind '" + kind + "'");
  }
  std::size_t count = 0;
  if (!(is >> word >> count) || word != "classifiers") throw ParseError(0, 0, "policy bundle: missing classifier count");
  std::vector<LinearClassifier> classifiers;
  classifiers.reserve(count);
  for (std::size_t k = 0; k < count; ++k) classifiers.push_back(read_classifier(is));
  if (kind == "ova") return std::make_shared<OvaPolicy>(std::move(classifiers));
  if (kind == "ecoc") return std::make_shared<EcocPolicy>(std::move(*matrix), std::move(classifiers));
  if (classifiers.size() != 1) throw ParseError(0, 0, "policy bundle: binary policy needs exactly one classifier");
  return std::make_shared<BinarySubPolicy>(std::move(classifiers.front()));
}

}  // namespace ecoc_rl
