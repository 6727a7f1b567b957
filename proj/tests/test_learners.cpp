#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "ecoc_rl/envs/maze.hpp"
#include "ecoc_rl/envs/tabular.hpp"
#include "ecoc_rl/learners.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ecoc_rl;

namespace {

const std::vector<std::string> kFiveByThree = {"++-", "-+-", "+-+", "-++", "+--"};

// Random transitions with rewards chosen per (s, a) by `reward`.
template <typename Fn>
TabularMdp with_rewards(std::size_t n, std::size_t na, double discount, std::uint64_t seed, Fn reward) {
  Rng rng(seed);
  const auto base = TabularMdp::random(n, na, discount, rng);
  std::vector<double> p, r;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t t = 0; t < n; ++t) p.push_back(base.probability(s, a, t));
      r.push_back(reward(s, a));
    }
  return TabularMdp(n, na, p, r, discount);
}

std::vector<TabularMdp::State> all_states(std::size_t n) {
  std::vector<TabularMdp::State> out;
  for (std::size_t s = 0; s < n; ++s) out.push_back({s});
  return out;
}

LearnerConfig small_config() {
  LearnerConfig cfg;
  cfg.sampled_states = 60;
  cfg.trajectories = 4;
  cfg.horizon = 30;
  cfg.max_iterations = 2;
  cfg.epochs = 50;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST(CollectLabels, DominantActionLabelsEveryState) {
  const auto m = with_rewards(8, 4, 0.9, 1, [](std::size_t, std::size_t a) { return a == 0 ? 1.0 : 0.0; });
  RandomPolicy pi(4);
  SimCounter c;
  const auto states = all_states(8);
  const auto labels = collect_labels<TabularMdp>(m, pi, states, {10, 1, 0.9}, 2.0, 3, c);
  ASSERT_EQ(labels.labels.size(), 8u);
  for (const auto& l : labels.labels) EXPECT_EQ(l.action.index, 0u);
}

TEST(CollectLabels, IdenticalActionsGiveNoLabels) {
  testenv::Chain chain(4);
  RandomPolicy pi(4);
  SimCounter c;
  std::vector<testenv::Chain::State> states{{0}, {5}, {17}};
  const auto labels = collect_labels<testenv::Chain>(chain, pi, states, {10, 20, 0.99}, 2.0, 1, c);
  EXPECT_TRUE(labels.empty());
  EXPECT_EQ(labels.nonterminal_states, 3u);
  EXPECT_THROW(collect_labels<testenv::Chain>(chain, pi, {}, {10, 20, 0.99}, 2.0, 1, c), DomainError);
}

TEST(CollectLabels, MatchesExactGreedyActionsWithManyRollouts) {
  const auto m = with_rewards(10, 3, 0.9, 5, [](std::size_t s, std::size_t a) { return a == s % 3 ? 1.0 : 0.0; });
  const auto q = oracle::policy_q(m, oracle::uniform_policy(10, 3));
  double min_gap = 1e9;
  std::vector<std::size_t> best(10);
  for (std::size_t s = 0; s < 10; ++s) {
    std::vector<double> row(q.begin() + static_cast<long>(s * 3), q.begin() + static_cast<long>(s * 3 + 3));
    best[s] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    std::sort(row.begin(), row.end());
    min_gap = std::min(min_gap, row[2] - row[1]);
  }
  ASSERT_GT(min_gap, 0.2);
  RandomPolicy pi(3);
  SimCounter c;
  const auto labels = collect_labels<TabularMdp>(m, pi, all_states(10), {10000, 200, 0.9}, 2.0, 11, c);
  ASSERT_EQ(labels.labels.size(), 10u);
  for (const auto& l : labels.labels) EXPECT_EQ(l.action.index, best[l.state]) << "state " << l.state;
}

TEST(CollectLabels, EveryLabelClearsItsThreshold) {
  Rng rng(3);
  const auto m = TabularMdp::random(12, 5, 0.9, rng);
  RandomPolicy pi(5);
  SimCounter c;
  const auto labels = collect_labels<TabularMdp>(m, pi, all_states(12), {20, 30, 0.9}, 1.0, 2, c);
  for (const auto& l : labels.labels) {
    EXPECT_GE(l.advantage, l.threshold);
    EXPECT_GT(l.advantage, 0.0);
  }
  EXPECT_EQ(c.rollouts_run, 12u * 5u * 20u);
  EXPECT_LE(c.transitions_taken, c.rollouts_run * 30u);
}

TEST(CollectLabels, IndependentOfWorkerCount) {
  Rng rng(3);
  const auto m = TabularMdp::random(12, 5, 0.9, rng);
  RandomPolicy pi(5);
  SimCounter c1, c4;
  const auto a = collect_labels<TabularMdp>(m, pi, all_states(12), {20, 30, 0.9}, 1.0, 2, c1, 1);
  const auto b = collect_labels<TabularMdp>(m, pi, all_states(12), {20, 30, 0.9}, 1.0, 2, c4, 4);
  ASSERT_EQ(a.labels.size(), b.labels.size());
  for (std::size_t k = 0; k < a.labels.size(); ++k) {
    EXPECT_EQ(a.labels[k].state, b.labels[k].state);
    EXPECT_EQ(a.labels[k].action, b.labels[k].action);
    EXPECT_EQ(a.labels[k].advantage, b.labels[k].advantage);
  }
  EXPECT_EQ(c1, c4);
}

TEST(Relabel, AllLabelsOnThirdAction) {
  const auto m = CodingMatrix::from_rows(kFiveByThree);
  LabelSet labels;
  for (std::size_t s = 0; s < 4; ++s) labels.labels.push_back({s, ActionId{2}, 1.0, 0.0});
  EXPECT_EQ(relabel_for_bit(labels, m, 0), std::vector<int>(4, 1));
  EXPECT_EQ(relabel_for_bit(labels, m, 1), std::vector<int>(4, -1));
  EXPECT_EQ(relabel_for_bit(labels, m, 2), std::vector<int>(4, 1));
}

TEST(SubMdp, PositiveSideDrawsUniformlyFromItsSet) {
  const auto m = CodingMatrix::from_rows(kFiveByThree);
  testenv::IndexReward base(5);
  const auto sub = make_sub_mdp(base, m, 0);
  EXPECT_EQ(sub.action_count(), 2u);
  Rng rng(1);
  std::vector<int> counts(5, 0);
  double total = 0.0;
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const auto tr = sub.step({}, ActionId{0}, rng);
    total += tr.reward;
    counts[static_cast<std::size_t>(tr.reward)]++;
  }
  // Exact expectation: (0 + 2 + 4) / 3 = 2; the sampling sd is sqrt(8/3).
  EXPECT_NEAR(total / n, 2.0, 4.0 * std::sqrt(8.0 / 3.0 / n));
  EXPECT_EQ(counts[1] + counts[3], 0);
  for (int a : {0, 2, 4}) EXPECT_NEAR(counts[static_cast<std::size_t>(a)] / double(n), 1.0 / 3.0, 0.01);
  Rng rng2(1);
  for (int i = 0; i < 1000; ++i) {
    const double r = sub.step({}, ActionId{1}, rng2).reward;
    EXPECT_TRUE(r == 1.0 || r == 3.0);
  }
  EXPECT_THROW(make_sub_mdp(base, m, 3), DomainError);
  EXPECT_THROW(SubMdp<testenv::IndexReward>(base, ColumnSplit{{ActionId{0}}, {}}), DomainError);
}

TEST(SubMdp, TwoActionsIsARenaming) {
  const auto m = CodingMatrix::from_rows({"-", "+"});
  testenv::IndexReward base(2);
  const auto sub = make_sub_mdp(base, m, 0);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sub.step({}, ActionId{0}, rng).reward, 1.0);
    EXPECT_EQ(sub.step({}, ActionId{1}, rng).reward, 0.0);
  }
}

TEST(Agreement, Examples) {
  testenv::IndexReward env(3, 1.0, false);
  std::vector<testenv::IndexReward::State> states(50);
  OvaPolicy a({LinearClassifier({0.0}, 1.0), LinearClassifier({0.0}, 0.0), LinearClassifier({0.0}, 0.0)});
  OvaPolicy b({LinearClassifier({0.0}, 0.0), LinearClassifier({0.0}, 1.0), LinearClassifier({0.0}, 0.0)});
  Rng rng(1);
  EXPECT_EQ(policy_agreement<testenv::IndexReward>(env, a, a, states, rng), 1.0);
  EXPECT_EQ(policy_agreement<testenv::IndexReward>(env, a, b, states, rng), 0.0);
  testenv::IndexReward big(10, 1.0, false);
  std::vector<testenv::IndexReward::State> many(20000);
  RandomPolicy r1(10), r2(10);
  EXPECT_NEAR(policy_agreement<testenv::IndexReward>(big, r1, r2, many, rng), 0.1, 0.01);
  EXPECT_THROW(policy_agreement<testenv::IndexReward>(env, a, a, {}, rng), DomainError);
}

TEST(Ova, LearnsDominantActionOnTwoActionMdp) {
  const auto m = with_rewards(20, 2, 0.9, 9, [](std::size_t, std::size_t a) { return a == 1 ? 1.0 : 0.0; });
  const auto v_star = oracle::optimal_v(m);
  const auto v_one = oracle::deterministic_v(m, std::vector<std::size_t>(20, 1));
  for (std::size_t s = 0; s < 20; ++s) ASSERT_NEAR(v_star[s], v_one[s], 1e-9);  // action 1 is optimal everywhere
  LearnerConfig cfg;
  cfg.sampled_states = 200;
  cfg.trajectories = 10;
  cfg.horizon = 50;
  cfg.max_iterations = 3;
  cfg.epochs = 200;
  cfg.discount = 0.9;
  cfg.seed = 4;
  const auto result = train_ova_rcpi(m, cfg);
  Rng rng(0);
  std::vector<double> x(20);
  std::size_t picks = 0;
  for (std::size_t s = 0; s < 20; ++s) {
    m.features({s}, x);
    picks += result.policy->act(x, rng).index == 1;
  }
  EXPECT_GE(picks, 20u * 99 / 100);
}

TEST(Cost, OvaAndErcpiRunSAK) {
  Rng rng(2);
  const auto m = TabularMdp::random(15, 6, 0.9, rng);
  auto cfg = small_config();
  for (int alg = 0; alg < 2; ++alg) {
    const auto r = alg == 0 ? train_ova_rcpi(m, cfg) : train_ercpi(m, cfg);
    ASSERT_FALSE(r.records.empty());
    for (const auto& rec : r.records) {
      EXPECT_EQ(rec.nonterminal_states, cfg.sampled_states);
      EXPECT_EQ(rec.rollouts_run, cfg.sampled_states * 6 * cfg.trajectories);
      EXPECT_LE(rec.transitions_taken, rec.rollouts_run * cfg.horizon);
    }
  }
}

TEST(Cost, BrcpiRunsTwoSKPerBit) {
  Rng rng(2);
  const auto maze = generate_maze(10, 8, kDefaultMazeProbabilities, rng, 2, 9);
  auto cfg = small_config();
  cfg.max_iterations = 1;
  const auto states = training_states(maze, cfg);
  const auto s_prime = static_cast<std::size_t>(
      std::count_if(states.begin(), states.end(), [&](const auto& s) { return !maze.is_terminal(s); }));
  const auto r = train_brcpi(maze, cfg);
  const std::size_t c = r.matrix->code_length();
  ASSERT_EQ(r.sub_records.size(), c);
  for (const auto& sub : r.sub_records) EXPECT_EQ(sub.front().rollouts_run, 2 * s_prime * cfg.trajectories);
  EXPECT_EQ(r.records.front().rollouts_run, c * 2 * s_prime * cfg.trajectories);
  const auto ova = train_ova_rcpi(maze, cfg);
  EXPECT_EQ(ova.records.front().rollouts_run, s_prime * 9 * cfg.trajectories);
}

TEST(Ercpi, TwoActionsUsesOneClassifier) {
  const auto m = with_rewards(10, 2, 0.9, 3, [](std::size_t s, std::size_t a) { return a == s % 2 ? 1.0 : 0.0; });
  auto cfg = small_config();
  const auto r = train_ercpi(m, cfg);
  ASSERT_TRUE(r.matrix);
  EXPECT_EQ(r.matrix->code_length(), 1u);
  const auto& p = dynamic_cast<const EcocPolicy&>(*r.policy);
  ASSERT_EQ(p.classifiers().size(), 1u);
  std::vector<double> x(10);
  Rng rng(0);
  for (std::size_t s = 0; s < 10; ++s) {
    m.features({s}, x);
    const int bit = p.classifiers()[0].score(x) >= 0.0 ? 1 : -1;
    const std::size_t expected = r.matrix->bit(0, 0) == bit ? 0 : 1;
    EXPECT_EQ(p.act(x, rng).index, expected);
  }
}

TEST(Brcpi, OrderOfSubProblemsDoesNotMatter) {
  Rng rng(5);
  const auto maze = generate_maze(8, 6, kDefaultMazeProbabilities, rng, 2, 9);
  auto cfg = small_config();
  const auto forward = train_brcpi(maze, cfg);
  std::vector<std::size_t> order(forward.matrix->code_length());
  std::iota(order.rbegin(), order.rend(), std::size_t{0});
  const auto backward = train_brcpi(maze, cfg, std::nullopt, order);
  EXPECT_EQ(policy_bundle_text(*forward.policy), policy_bundle_text(*backward.policy));
  EXPECT_THROW(train_brcpi(maze, cfg, std::nullopt, std::vector<std::size_t>{0, 0}), DomainError);
}

TEST(Learners, IdenticalAcrossWorkerCounts) {
  Rng rng(6);
  const auto maze = generate_maze(8, 6, kDefaultMazeProbabilities, rng, 2, 9);
  auto cfg = small_config();
  auto cfg4 = cfg;
  cfg4.workers = 4;
  auto same = [](const LearnerResult& a, const LearnerResult& b) {
    EXPECT_EQ(policy_bundle_text(*a.policy), policy_bundle_text(*b.policy));
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      EXPECT_EQ(a.records[k].rollouts_run, b.records[k].rollouts_run);
      EXPECT_EQ(a.records[k].transitions_taken, b.records[k].transitions_taken);
    }
  };
  same(train_ova_rcpi(maze, cfg), train_ova_rcpi(maze, cfg4));
  same(train_ercpi(maze, cfg), train_ercpi(maze, cfg4));
  same(train_brcpi(maze, cfg), train_brcpi(maze, cfg4));
}

TEST(Learners, EmptyLabelSetKeepsGoingWithDiagnostic) {
  testenv::Chain chain(3);
  auto cfg = small_config();
  const auto r = train_ova_rcpi(chain, cfg);
  ASSERT_EQ(r.records.size(), cfg.max_iterations);
  for (const auto& rec : r.records) {
    EXPECT_TRUE(std::isnan(rec.agreement));
    EXPECT_FALSE(rec.notes.empty());
  }
  EXPECT_FALSE(r.policy->uses_features());  // still the random initial policy
}

TEST(Learners, RejectBadConfig) {
  testenv::Chain chain(3);
  auto cfg = small_config();
  cfg.trajectories = 0;
  EXPECT_THROW(train_ova_rcpi(chain, cfg), ConfigError);
  cfg = small_config();
  cfg.agreement_threshold = 0.0;
  EXPECT_THROW(train_ercpi(chain, cfg), ConfigError);
  testenv::Chain single(1);
  EXPECT_THROW(train_brcpi(single, small_config()), DomainError);
}

TEST(Learners, SmallMazesBeatRandom) {
  Rng rng(21);
  const auto maze3 = generate_maze(15, 15, kDefaultMazeProbabilities, rng);
  LearnerConfig cfg;
  cfg.sampled_states = 150;
  cfg.trajectories = 5;
  cfg.max_iterations = 4;
  cfg.epochs = 200;
  cfg.seed = 3;
  RandomPolicy random3(3);
  const double base3 = evaluate_policy(maze3, random3, 200, 100, 1.0, 99).mean_return;
  const auto ova = train_ova_rcpi(maze3, cfg);
  EXPECT_GT(evaluate_policy(maze3, *ova.policy, 200, 100, 1.0, 99).mean_return, base3);

  const auto maze27 = maze3.with_actions(3, 27);
  RandomPolicy random27(27);
  const double base27 = evaluate_policy(maze27, random27, 200, 100, 1.0, 99).mean_return;
  const auto brcpi = train_brcpi(maze27, cfg);
  EXPECT_GT(evaluate_policy(maze27, *brcpi.policy, 200, 100, 1.0, 99).mean_return, base27);
}

TEST(RecordsCsv, HeaderAndTimingSwitch) {
  TrainingRecord r;
  r.iteration = 1;
  r.avg_reward = -3.5;
  r.agreement = 0.25;
  r.rollouts_run = 10;
  r.transitions_taken = 20;
  r.sim_wall_ns = 123;
  r.learn_wall_ns = 456;
  std::ostringstream on, off;
  write_records_csv(on, std::vector<TrainingRecord>{r});
  write_records_csv(off, std::vector<TrainingRecord>{r}, false);
  EXPECT_EQ(on.str(),
            "iteration,avg_reward,agreement,rollouts_run,transitions_taken,sim_wall_ns,learn_wall_ns\n"
            "1,-3.5,0.25,10,20,123,456\n");
  EXPECT_EQ(off.str(),
            "iteration,avg_reward,agreement,rollouts_run,transitions_taken,sim_wall_ns,learn_wall_ns\n"
            "1,-3.5,0.25,10,20,0,0\n");
}
