#include <gtest/gtest.h>

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ecoc_rl/policy.hpp"
#include "oracles.hpp"

using namespace ecoc_rl;

namespace {

LinearClassifier bias_only(std::size_t dim, double b) { return LinearClassifier(std::vector<double>(dim, 0.0), b); }

LinearClassifier random_classifier(std::size_t dim, Rng& rng) {
  std::vector<double> w(dim);
  for (auto& v : w) v = uniform_real(rng, -1, 1);
  return LinearClassifier(w, uniform_real(rng, -1, 1));
}

// Always returns the action it was built with.
class Fixed final : public Policy {
 public:
  Fixed(std::size_t actions, std::size_t a) : actions_(actions), a_(a) {}
  std::size_t action_count() const override { return actions_; }
  ActionId act(std::span<const double>, Rng&) const override { return ActionId{a_}; }

 private:
  std::size_t actions_, a_;
};

}  // namespace

TEST(Ova, SimpleCases) {
  const std::vector<double> x{1.0};
  Rng rng(0);
  OvaPolicy p({bias_only(1, 1.0), bias_only(1, -1.0)});
  EXPECT_EQ(ova_act(p, x).index, 0u);
  OvaPolicy tie({bias_only(1, 0.5), bias_only(1, 0.5), bias_only(1, 0.5)});
  EXPECT_EQ(tie.act(x, rng).index, 0u);
}

TEST(Ova, MatchesBruteForceArgmax) {
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    std::vector<LinearClassifier> cs;
    for (int a = 0; a < 5; ++a) cs.push_back(random_classifier(4, rng));
    OvaPolicy p(cs);
    std::vector<double> x(4);
    for (auto& v : x) v = uniform_real(rng, -3, 3);
    std::size_t best = 0;
    for (std::size_t a = 1; a < 5; ++a)
      if (cs[a].score(x) > cs[best].score(x)) best = a;
    EXPECT_EQ(ova_act(p, x).index, best);
  }
}

TEST(Ecoc, ExactCodesDecodeToTheirAction) {
  const auto m = CodingMatrix::from_rows({"++-", "-+-", "+-+", "-++", "+--"});
  const std::vector<double> x{1.0};
  for (std::size_t a = 0; a < 5; ++a) {
    std::vector<LinearClassifier> cs;
    for (std::size_t i = 0; i < 3; ++i) cs.push_back(bias_only(1, m.bit(a, i)));
    EXPECT_EQ(ecoc_act(EcocPolicy(m, cs), x).index, a);
  }
  std::vector<LinearClassifier> all_minus(3, bias_only(1, -1.0));
  EXPECT_EQ(ecoc_act(EcocPolicy(m, all_minus), x).index, 1u);
  // Zero scores count as '+', so (+,+,+) decodes like it.
  std::vector<LinearClassifier> zeros(3, bias_only(1, 0.0));
  EXPECT_EQ(ecoc_act(EcocPolicy(m, zeros), x).index, oracle::nearest_row({"++-", "-+-", "+-+", "-++", "+--"}, "+++"));
  EXPECT_THROW(EcocPolicy(m, std::vector<LinearClassifier>(2, bias_only(1, 0.0))), DomainError);
}

TEST(Ecoc, MatchesBruteForceDecode) {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const std::size_t a_count = 3 + uniform_index(rng, 30);
    const auto m = generate_random_matrix(a_count, code_length(a_count, 3.0), rng);
    std::vector<std::string> rows;
    for (std::size_t a = 0; a < a_count; ++a) {
      std::string r;
      for (std::size_t i = 0; i < m.code_length(); ++i) r.push_back(m.bit(a, i) > 0 ? '+' : '-');
      rows.push_back(r);
    }
    std::vector<LinearClassifier> cs;
    for (std::size_t i = 0; i < m.code_length(); ++i) cs.push_back(random_classifier(3, rng));
    EcocPolicy p(m, cs);
    for (int q = 0; q < 20; ++q) {
      std::vector<double> x(3);
      for (auto& v : x) v = uniform_real(rng, -2, 2);
      std::string bits;
      for (const auto& c : cs) bits.push_back(c.score(x) >= 0.0 ? '+' : '-');
      EXPECT_EQ(ecoc_act(p, x).index, oracle::nearest_row(rows, bits));
    }
  }
}

TEST(Ecoc, CorrectsUpToHalfDistanceWrongBits) {
  Rng rng(44);
  const auto m = generate_random_matrix(20, 30, rng);
  const std::size_t t = (m.min_distance() - 1) / 2;
  const std::vector<double> x{1.0};
  for (std::size_t a = 0; a < 20; ++a) {
    std::vector<LinearClassifier> cs;
    for (std::size_t i = 0; i < 30; ++i) cs.push_back(bias_only(1, i < t ? -m.bit(a, i) : m.bit(a, i)));
    EXPECT_EQ(ecoc_act(EcocPolicy(m, cs), x).index, a);
  }
}

TEST(Mixture, ExtremesAndFrequency) {
  auto old_p = std::make_shared<Fixed>(3, 0);
  auto new_p = std::make_shared<Fixed>(3, 2);
  const std::vector<double> x;
  Rng rng(5);
  AlphaMixturePolicy never_old(old_p, new_p, 0.0), always_old(old_p, new_p, 1.0), half(old_p, new_p, 0.5);
  int old_count = 0;
  for (int i = 0; i < 10000; ++i) {
    EXPECT_EQ(mixture_act(never_old, x, rng).index, 2u);
    EXPECT_EQ(mixture_act(always_old, x, rng).index, 0u);
    old_count += mixture_act(half, x, rng).index == 0;
  }
  EXPECT_NEAR(old_count / 10000.0, 0.5, 0.02);
  EXPECT_THROW(AlphaMixturePolicy(old_p, new_p, 1.5), DomainError);
  EXPECT_THROW(AlphaMixturePolicy(old_p, std::make_shared<Fixed>(4, 0), 0.5), DomainError);
}

TEST(RandomPolicyTest, Uniformity) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(random_act(1, rng).index, 0u);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 100000; ++i) counts[random_act(5, rng).index]++;
  for (int c : counts) EXPECT_NEAR(c / 100000.0, 0.2, 0.01);

  // Chi-square with 99 degrees of freedom; 148.23 is the 0.999 quantile.
  std::vector<int> big(100, 0);
  const int n = 100000;
  RandomPolicy p(100);
  const std::vector<double> none;
  for (int i = 0; i < n; ++i) big[p.act(none, rng).index]++;
  double chi2 = 0.0;
  for (int c : big) chi2 += (c - n / 100.0) * (c - n / 100.0) / (n / 100.0);
  EXPECT_LT(chi2, 148.23);
  EXPECT_FALSE(p.uses_features());
}

TEST(Bundle, RoundTripsEveryKind) {
  Rng rng(2);
  const auto m = generate_random_matrix(6, 5, rng);
  std::vector<LinearClassifier> cs5, cs6;
  for (int i = 0; i < 5; ++i) cs5.push_back(random_classifier(3, rng));
  for (int i = 0; i < 6; ++i) cs6.push_back(random_classifier(3, rng));
  const std::vector<std::shared_ptr<Policy>> policies{std::make_shared<EcocPolicy>(m, cs5),
                                                      std::make_shared<OvaPolicy>(cs6),
                                                      std::make_shared<BinarySubPolicy>(cs5[0])};
  for (const auto& p : policies) {
    const std::string text = policy_bundle_text(*p);
    std::istringstream in(text);
    const auto back = read_policy_bundle(in);
    EXPECT_EQ(policy_bundle_text(*back), text);
    for (int q = 0; q < 20; ++q) {
      std::vector<double> x{uniform01(rng), uniform01(rng), uniform01(rng)};
      EXPECT_EQ(back->act(x, rng), p->act(x, rng));
    }
  }
  RandomPolicy r(3);
  std::ostringstream os;
  EXPECT_THROW(write_policy_bundle(os, r), DomainError);
  std::istringstream junk("something else");
  EXPECT_THROW(read_policy_bundle(junk), ParseError);
}
