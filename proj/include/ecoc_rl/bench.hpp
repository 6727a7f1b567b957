#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ecoc_rl/ecoc.hpp"
#include "ecoc_rl/envs/maze.hpp"
#include "ecoc_rl/envs/mountain_car.hpp"
#include "ecoc_rl/envs/tabular.hpp"
#include "ecoc_rl/error.hpp"
#include "ecoc_rl/learners.hpp"
#include "ecoc_rl/linear.hpp"
#include "ecoc_rl/mdp.hpp"
#include "ecoc_rl/parallel.hpp"
#include "ecoc_rl/policy.hpp"
#include "ecoc_rl/random.hpp"

namespace ecoc_rl {

enum class Algorithm { ova, ercpi, brcpi, random };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ova: return "ova";
    case Algorithm::ercpi: return "ercpi";
    case Algorithm::brcpi: return "brcpi";
    case Algorithm::random: return "random";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "ova") return Algorithm::ova;
  if (s == "ercpi") return Algorithm::ercpi;
  if (s == "brcpi") return Algorithm::brcpi;
  if (s == "random") return Algorithm::random;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected ova, ercpi, brcpi or random)");
}

enum class EnvKind { maze, mountain_car, tabular };

inline std::string_view to_string(EnvKind e) {
  switch (e) {
    case EnvKind::maze: return "maze";
    case EnvKind::mountain_car: return "mountain_car";
    case EnvKind::tabular: return "tabular";
  }
  return "?";
}

struct MazeSpec {
  std::size_t width = 15;
  std::size_t height = 15;
  std::size_t sequence_length = 0;  // 0: smallest L with 3^L >= actions
  std::size_t actions = 3;
  std::array<double, 3> probabilities = kDefaultMazeProbabilities;
  std::string file;  // optional grid file; overrides random generation
};

struct TabularSpec {
  std::size_t states = 10;
  std::size_t actions = 4;
  double discount = 0.9;
  std::size_t branching = 3;
};

struct ExperimentSpec {
  EnvKind env = EnvKind::maze;
  Algorithm algorithm = Algorithm::brcpi;
  MazeSpec maze;
  MountainCarConfig mountain_car;
  TabularSpec tabular;
  LearnerConfig learner;
  std::size_t eval_episodes = 100;
  std::size_t eval_horizon = 100;
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string out = "results";
  bool timing = true;
  std::vector<std::size_t> sweep_actions{3, 9, 27};
  std::vector<std::size_t> sweep_rollouts{1, 10, 30};
  std::vector<Algorithm> sweep_algorithms{Algorithm::ova, Algorithm::ercpi, Algorithm::brcpi, Algorithm::random};

  std::size_t action_count() const {
    switch (env) {
      case EnvKind::maze: return maze.actions;
      case EnvKind::mountain_car: return mountain_car.action_count;
      case EnvKind::tabular: return tabular.actions;
    }
    return 0;
  }

  void set_action_count(std::size_t a) {
    maze.actions = a;
    mountain_car.action_count = a;
    tabular.actions = a;
  }

  void validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (eval_horizon < 1) throw ConfigError("eval.horizon must be >= 1");
    if (action_count() < 2) throw ConfigError("action count must be >= 2");
    if (env == EnvKind::tabular && (tabular.states < 1 || !(tabular.discount > 0.0 && tabular.discount < 1.0)))
      throw ConfigError("tabular: need states >= 1 and discount in (0, 1)");
    learner.validate();
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

inline std::size_t to_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(to_u64(key, v));
}

inline double to_real(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected on/off, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string_view rest = v;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

}  // namespace detail

/// Parses "key = value" lines; '#' starts a comment. Later keys win.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto lines = detail::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = lines[n];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(n + 1, 1, "expected 'key = value'");
    const auto key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(n + 1, 1, "empty key");
    out.emplace_back(std::string(key), std::string(detail::trim(line.substr(eq + 1))));
  }
  return out;
}

/// Applies one setting; unknown keys and malformed values raise ConfigError.
inline void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  using namespace detail;
  auto& L = spec.learner;
  if (key == "env") {
    if (value == "maze") spec.env = EnvKind::maze;
    else if (value == "mountain_car") spec.env = EnvKind::mountain_car;
    else if (value == "tabular") spec.env = EnvKind::tabular;
    else throw ConfigError("env: unknown environment '" + value + "'");
  } else if (key == "algorithm") {
    spec.algorithm = parse_algorithm(value);
  } else if (key == "actions") {
    spec.set_action_count(to_size(key, value));
  } else if (key == "maze.width") {
    spec.maze.width = to_size(key, value);
  } else if (key == "maze.height") {
    spec.maze.height = to_size(key, value);
  } else if (key == "maze.sequence_length") {
    spec.maze.sequence_length = to_size(key, value);
  } else if (key == "maze.actions") {
    spec.maze.actions = to_size(key, value);
  } else if (key == "maze.probabilities") {
    const auto items = split_list(value);
    if (items.size() != 3) throw ConfigError("maze.probabilities: expected three comma-separated values");
    for (std::size_t k = 0; k < 3; ++k) spec.maze.probabilities[k] = to_real(key, items[k]);
  } else if (key == "maze.file") {
    spec.maze.file = value;
  } else if (key == "mountain_car.actions") {
    spec.mountain_car.action_count = to_size(key, value);
  } else if (key == "mountain_car.max_acceleration") {
    spec.mountain_car.max_acceleration = to_real(key, value);
  } else if (key == "mountain_car.tilings") {
    spec.mountain_car.tilings = to_size(key, value);
  } else if (key == "mountain_car.tiles") {
    spec.mountain_car.tiles_per_dim = to_size(key, value);
  } else if (key == "tabular.states") {
    spec.tabular.states = to_size(key, value);
  } else if (key == "tabular.actions") {
    spec.tabular.actions = to_size(key, value);
  } else if (key == "tabular.discount") {
    spec.tabular.discount = to_real(key, value);
  } else if (key == "tabular.branching") {
    spec.tabular.branching = to_size(key, value);
  } else if (key == "learner.S" || key == "learner.sampled_states") {
    L.sampled_states = to_size(key, value);
  } else if (key == "learner.K" || key == "learner.trajectories") {
    L.trajectories = to_size(key, value);
  } else if (key == "learner.T" || key == "learner.horizon") {
    L.horizon = to_size(key, value);
  } else if (key == "learner.alpha") {
    L.alpha = to_real(key, value);
  } else if (key == "learner.margin") {
    L.margin = to_real(key, value);
  } else if (key == "learner.max_iterations") {
    L.max_iterations = to_size(key, value);
  } else if (key == "learner.agreement_threshold") {
    L.agreement_threshold = to_real(key, value);
  } else if (key == "learner.redundancy") {
    L.redundancy = to_real(key, value);
  } else if (key == "learner.discount") {
    L.discount = to_real(key, value);
  } else if (key == "learner.epochs") {
    L.epochs = to_size(key, value);
  } else if (key == "learner.learning_rate") {
    L.learning_rate = to_real(key, value);
  } else if (key == "learner.resample_states") {
    L.resample_states = to_bool(key, value);
  } else if (key == "learner.matrix_retries") {
    L.matrix_retries = to_size(key, value);
  } else if (key == "eval.episodes") {
    spec.eval_episodes = to_size(key, value);
  } else if (key == "eval.horizon") {
    spec.eval_horizon = to_size(key, value);
  } else if (key == "repetitions") {
    spec.repetitions = to_size(key, value);
  } else if (key == "seed") {
    spec.seed = to_u64(key, value);
  } else if (key == "workers") {
    spec.workers = to_size(key, value);
  } else if (key == "out") {
    spec.out = value;
  } else if (key == "timing") {
    spec.timing = to_bool(key, value);
  } else if (key == "sweep.actions") {
    spec.sweep_actions.clear();
    for (const auto& item : split_list(value)) spec.sweep_actions.push_back(to_size(key, item));
  } else if (key == "sweep.rollouts") {
    spec.sweep_rollouts.clear();
    for (const auto& item : split_list(value)) spec.sweep_rollouts.push_back(to_size(key, item));
  } else if (key == "sweep.algorithms") {
    spec.sweep_algorithms.clear();
    for (const auto& item : split_list(value)) spec.sweep_algorithms.push_back(parse_algorithm(item));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

inline ExperimentSpec parse_experiment(std::string_view text, ExperimentSpec spec = {}) {
  for (const auto& [k, v] : parse_config_text(text)) apply_setting(spec, k, v);
  return spec;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a temporary sibling and renames, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

using EnvVariant = std::variant<MazeEnv, MountainCarEnv, TabularMdp>;

namespace detail {
enum BenchTag : std::uint64_t { kEnvTag = 101, kLearnerTag, kFinalEvalTag };

inline std::size_t sequence_length_for(std::size_t actions) {
  std::size_t l = 1;
  while (pow3(l) < actions) ++l;
  return l;
}
}  // namespace detail

/// Environment instance for one repetition. Random mazes and tabular MDPs
/// depend on (seed, repetition) only, so the same grid is reused across
/// action counts within a sweep.
inline EnvVariant make_environment(const ExperimentSpec& spec, std::size_t repetition) {
  Rng rng(derive_seed(spec.seed, detail::kEnvTag, repetition));
  switch (spec.env) {
    case EnvKind::maze: {
      const std::size_t l =
          spec.maze.sequence_length ? spec.maze.sequence_length : detail::sequence_length_for(spec.maze.actions);
      if (!spec.maze.file.empty()) return parse_maze(read_text_file(spec.maze.file), l, spec.maze.actions);
      return generate_maze(spec.maze.width, spec.maze.height, spec.maze.probabilities, rng)
          .with_actions(l, spec.maze.actions);
    }
    case EnvKind::mountain_car:
      return MountainCarEnv(spec.mountain_car);
    case EnvKind::tabular:
      return TabularMdp::random(spec.tabular.states, spec.tabular.actions, spec.tabular.discount, rng,
                                spec.tabular.branching);
  }
  throw ConfigError("unknown environment");
}

struct RepetitionResult {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  double final_reward = std::numeric_limits<double>::quiet_NaN();
  double reward_std = std::numeric_limits<double>::quiet_NaN();
  std::vector<TrainingRecord> records;

  std::uint64_t rollouts_run() const {
    std::uint64_t n = 0;
    for (const auto& r : records) n += r.rollouts_run;
    return n;
  }
  std::uint64_t transitions_taken() const {
    std::uint64_t n = 0;
    for (const auto& r : records) n += r.transitions_taken;
    return n;
  }
  template <typename Field>
  double mean_per_iteration(Field f) const {
    if (records.empty()) return 0.0;
    double total = 0.0;
    for (const auto& r : records) total += static_cast<double>(f(r));
    return total / static_cast<double>(records.size());
  }
};

struct ResultSummary {
  Algorithm algorithm = Algorithm::random;
  EnvKind env = EnvKind::maze;
  std::size_t actions = 0;
  std::size_t code_length = 0;
  std::vector<RepetitionResult> repetitions;
  std::size_t failed = 0;
  double mean_reward = std::numeric_limits<double>::quiet_NaN();
  double std_reward = std::numeric_limits<double>::quiet_NaN();
  double mean_iteration_sim_ns = 0.0;
  double mean_iteration_learn_ns = 0.0;
  double mean_iteration_total_ns = 0.0;
  std::uint64_t rollouts_run = 0;
  std::uint64_t transitions_taken = 0;
};

/// Trains and evaluates one repetition; exceptions become a failed result.
inline RepetitionResult run_repetition(const ExperimentSpec& spec, std::size_t repetition, std::size_t learner_workers) {
  RepetitionResult out;
  out.repetition = repetition;
  out.seed = derive_seed(spec.seed, detail::kLearnerTag, repetition);
  try {
    const EnvVariant env_v = make_environment(spec, repetition);
    LearnerConfig cfg = spec.learner;
    cfg.seed = out.seed;
    cfg.workers = learner_workers;
    cfg.eval_episodes = spec.eval_episodes;
    cfg.eval_horizon = spec.eval_horizon;
    cfg.eval_discount = 1.0;
    std::visit(
        [&](const auto& env) {
          PolicyPtr policy;
          switch (spec.algorithm) {
            case Algorithm::random: policy = std::make_shared<RandomPolicy>(env.action_count()); break;
            case Algorithm::ova: {
              auto r = train_ova_rcpi(env, cfg);
              policy = r.policy;
              out.records = std::move(r.records);
              break;
            }
            case Algorithm::ercpi: {
              auto r = train_ercpi(env, cfg);
              policy = r.policy;
              out.records = std::move(r.records);
              break;
            }
            case Algorithm::brcpi: {
              auto r = train_brcpi(env, cfg);
              policy = r.policy;
              out.records = std::move(r.records);
              break;
            }
          }
          const auto eval = evaluate_policy(env, *policy, spec.eval_episodes, spec.eval_horizon, 1.0,
                                            derive_seed(out.seed, detail::kFinalEvalTag));
          out.final_reward = eval.mean_return;
          out.reward_std = eval.stddev;
        },
        env_v);
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

inline ResultSummary summarize(const ExperimentSpec& spec, std::vector<RepetitionResult> reps) {
  ResultSummary s;
  s.algorithm = spec.algorithm;
  s.env = spec.env;
  s.actions = spec.action_count();
  s.code_length = s.actions >= 2 ? code_length(s.actions, spec.learner.redundancy) : 0;
  s.repetitions = std::move(reps);
  std::vector<double> rewards;
  for (const auto& r : s.repetitions) {
    if (!r.ok) {
      ++s.failed;
      continue;
    }
    rewards.push_back(r.final_reward);
    s.mean_iteration_sim_ns += r.mean_per_iteration([](const TrainingRecord& t) { return t.sim_wall_ns; });
    s.mean_iteration_learn_ns += r.mean_per_iteration([](const TrainingRecord& t) { return t.learn_wall_ns; });
    s.mean_iteration_total_ns += r.mean_per_iteration([](const TrainingRecord& t) { return t.iteration_wall_ns; });
    s.rollouts_run += r.rollouts_run();
    s.transitions_taken += r.transitions_taken();
  }
  if (!rewards.empty()) {
    const auto n = static_cast<double>(rewards.size());
    double sum = 0.0;
    for (double x : rewards) sum += x;
    s.mean_reward = sum / n;
    double ss = 0.0;
    for (double x : rewards) ss += (x - s.mean_reward) * (x - s.mean_reward);
    s.std_reward = rewards.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.mean_iteration_sim_ns /= n;
    s.mean_iteration_learn_ns /= n;
    s.mean_iteration_total_ns /= n;
  }
  return s;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string ns_field(double ns, bool timing) { return timing ? detail::format_double(std::round(ns)) : "0"; }

}  // namespace detail

inline constexpr const char* kSummaryCsvHeader =
    "algorithm,env,actions,code_length,repetitions,failed,mean_reward,std_reward,mean_iteration_sim_ns,"
    "mean_iteration_learn_ns,mean_iteration_total_ns,rollouts_run,transitions_taken";

inline std::string summary_csv_row(const ResultSummary& s, bool timing) {
  std::ostringstream os;
  os << to_string(s.algorithm) << ',' << to_string(s.env) << ',' << s.actions << ',' << s.code_length << ','
     << s.repetitions.size() << ',' << s.failed << ',' << detail::format_double(s.mean_reward) << ','
     << detail::format_double(s.std_reward) << ',' << detail::ns_field(s.mean_iteration_sim_ns, timing) << ','
     << detail::ns_field(s.mean_iteration_learn_ns, timing) << ','
     << detail::ns_field(s.mean_iteration_total_ns, timing) << ',' << s.rollouts_run << ',' << s.transitions_taken;
  return os.str();
}

/// iterations.csv, repetitions.csv and summary.csv for one summary.
inline void write_experiment_files(const std::filesystem::path& dir, const ResultSummary& s, bool timing) {
  std::ostringstream it;
  it << "repetition," << kRecordCsvHeader << "\n";
  for (const auto& r : s.repetitions) {
    std::ostringstream rows;
    write_records_csv(rows, r.records, timing, false);
    std::istringstream lines(rows.str());
    for (std::string line; std::getline(lines, line);) it << r.repetition << ',' << line << "\n";
  }
  std::ostringstream reps;
  reps << "repetition,seed,status,final_reward,reward_std,iterations,rollouts_run,transitions_taken,error\n";
  for (const auto& r : s.repetitions)
    reps << r.repetition << ',' << r.seed << ',' << (r.ok ? "ok" : "failed") << ',' << detail::format_double(r.final_reward)
         << ',' << detail::format_double(r.reward_std) << ',' << r.records.size() << ',' << r.rollouts_run() << ','
         << r.transitions_taken() << ',' << detail::csv_field(r.error) << "\n";
  write_file_atomic(dir / "iterations.csv", it.str());
  write_file_atomic(dir / "repetitions.csv", reps.str());
  write_file_atomic(dir / "summary.csv", std::string(kSummaryCsvHeader) + "\n" + summary_csv_row(s, timing) + "\n");
}

/// Runs every repetition (in parallel up to spec.workers), writes the CSVs
/// under `spec.out` unless it is empty, and returns the summary.
inline ResultSummary run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t outer = std::min(spec.workers, spec.repetitions);
  const std::size_t inner = outer > 1 ? 1 : spec.workers;
  std::vector<RepetitionResult> reps(spec.repetitions);
  parallel_for(spec.repetitions, outer, [&](std::size_t r, std::size_t) { reps[r] = run_repetition(spec, r, inner); });
  ResultSummary s = summarize(spec, std::move(reps));
  if (!spec.out.empty()) write_experiment_files(spec.out, s, spec.timing);
  return s;
}

struct SweepCell {
  std::size_t x = 0;  // action count or rollout count
  ResultSummary summary;
  std::string error;
};

inline constexpr const char* kActionsPlotHeader =
    "actions,code_length,algorithm,mean_reward,std_reward,mean_iteration_sim_ns,mean_iteration_learn_ns,"
    "mean_iteration_total_ns,speedup,sim_speedup,rollouts_run,transitions_taken,failed";

inline constexpr const char* kRolloutsPlotHeader =
    "rollouts,algorithm,mean_reward,std_reward,mean_iteration_total_ns,rollouts_run,transitions_taken,failed";

namespace detail {

inline ResultSummary run_cell(const ExperimentSpec& spec, SweepCell& cell) {
  try {
    return run_experiment(spec);
  } catch (const std::exception& e) {
    cell.error = e.what();
    ResultSummary s;
    s.algorithm = spec.algorithm;
    s.env = spec.env;
    s.actions = spec.action_count();
    s.failed = spec.repetitions;
    return s;
  }
}

}  // namespace detail

/// One experiment per (action count, algorithm); each cell's CSVs go to
/// out/A<count>_<algorithm>/, the combined table to out/plotdata_actions.csv.
/// Speedups are relative to OVA at the same action count (NaN without an OVA cell).
inline std::vector<SweepCell> sweep_actions(const ExperimentSpec& base, std::span<const std::size_t> counts) {
  if (counts.empty()) throw ConfigError("sweep_actions: no action counts");
  for (auto a : counts)
    if (a < 2) throw ConfigError("sweep_actions: action counts must be >= 2");
  if (base.sweep_algorithms.empty()) throw ConfigError("sweep_actions: no algorithms");
  std::vector<SweepCell> cells;
  for (auto a : counts)
    for (auto alg : base.sweep_algorithms) {
      SweepCell cell;
      cell.x = a;
      ExperimentSpec spec = base;
      spec.algorithm = alg;
      spec.set_action_count(a);
      if (spec.env == EnvKind::maze && base.maze.sequence_length != 0 && pow3(base.maze.sequence_length) < a)
        spec.maze.sequence_length = 0;
      spec.out = base.out.empty()
                     ? std::string()
                     : (std::filesystem::path(base.out) / ("A" + std::to_string(a) + "_" + std::string(to_string(alg))))
                           .string();
      cell.summary = detail::run_cell(spec, cell);
      cells.push_back(std::move(cell));
    }

  std::ostringstream os;
  os << kActionsPlotHeader << "\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& cell : cells) {
    double speedup = nan;
    double sim_speedup = nan;
    for (const auto& ref : cells)
      if (ref.x == cell.x && ref.summary.algorithm == Algorithm::ova && cell.summary.algorithm != Algorithm::random &&
          cell.summary.mean_iteration_total_ns > 0.0 && cell.summary.mean_iteration_sim_ns > 0.0) {
        speedup = ref.summary.mean_iteration_total_ns / cell.summary.mean_iteration_total_ns;
        sim_speedup = ref.summary.mean_iteration_sim_ns / cell.summary.mean_iteration_sim_ns;
      }
    const auto& s = cell.summary;
    os << cell.x << ',' << code_length(cell.x, base.learner.redundancy) << ',' << to_string(s.algorithm) << ','
       << detail::format_double(s.mean_reward) << ',' << detail::format_double(s.std_reward) << ','
       << detail::ns_field(s.mean_iteration_sim_ns, base.timing) << ','
       << detail::ns_field(s.mean_iteration_learn_ns, base.timing) << ','
       << detail::ns_field(s.mean_iteration_total_ns, base.timing) << ','
       << (base.timing ? detail::format_double(speedup) : "0") << ',' << (base.timing ? detail::format_double(sim_speedup) : "0")
       << ',' << s.rollouts_run << ',' << s.transitions_taken << ',' << s.failed << "\n";
  }
  if (!base.out.empty()) write_file_atomic(std::filesystem::path(base.out) / "plotdata_actions.csv", os.str());
  return cells;
}

/// One experiment per rollout count K with base.algorithm; CSVs under
/// out/K<k>/ and out/plotdata_rollouts.csv.
inline std::vector<SweepCell> sweep_rollouts(const ExperimentSpec& base, std::span<const std::size_t> ks) {
  if (ks.empty()) throw ConfigError("sweep_rollouts: no rollout counts");
  std::vector<SweepCell> cells;
  for (auto k : ks) {
    SweepCell cell;
    cell.x = k;
    ExperimentSpec spec = base;
    spec.learner.trajectories = k;
    spec.out =
        base.out.empty() ? std::string() : (std::filesystem::path(base.out) / ("K" + std::to_string(k))).string();
    cell.summary = detail::run_cell(spec, cell);
    cells.push_back(std::move(cell));
  }
  std::ostringstream os;
  os << kRolloutsPlotHeader << "\n";
  for (const auto& cell : cells) {
    const auto& s = cell.summary;
    os << cell.x << ',' << to_string(s.algorithm) << ',' << detail::format_double(s.mean_reward) << ','
       << detail::format_double(s.std_reward) << ',' << detail::ns_field(s.mean_iteration_total_ns, base.timing) << ','
       << s.rollouts_run << ',' << s.transitions_taken << ',' << s.failed << "\n";
  }
  if (!base.out.empty()) write_file_atomic(std::filesystem::path(base.out) / "plotdata_rollouts.csv", os.str());
  return cells;
}

}  // namespace ecoc_rl
