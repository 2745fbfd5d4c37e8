#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "cfgtune/cfgtune.hpp"

namespace cfgtune::testing {

inline ParameterSpace kafka_space() { return parse_space(bundled::kafka_streams_space, "kafka-streams.space"); }

/// d real-valued linear parameters x1..xd on [0, 1], default 0.5.
inline ParameterSpace unit_space(std::size_t d) {
  std::vector<ParameterDefinition> params;
  for (std::size_t i = 0; i < d; ++i) {
    params.push_back({"x" + std::to_string(i + 1), 0.0, 1.0, Scale::linear, ValueType::real, "", 0.5});
  }
  return ParameterSpace(std::move(params));
}

/// Fresh, empty directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("cfgtune-" + tag + "-" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Compares `actual` with tests/golden/<name>. With CFGTUNE_UPDATE_GOLDEN=1
/// the golden file is rewritten instead.
inline bool matches_golden(const std::string& name, const std::string& actual, std::string* diagnostic = nullptr) {
  const std::filesystem::path path = std::filesystem::path(CFGTUNE_GOLDEN_DIR) / name;
  const char* update = std::getenv("CFGTUNE_UPDATE_GOLDEN");
  if (update && std::string(update) == "1") {
    spit(path, actual);
    return true;
  }
  if (!std::filesystem::exists(path)) {
    if (diagnostic) *diagnostic = "missing golden file " + path.string();
    return false;
  }
  const std::string expected = slurp(path);
  if (expected == actual) return true;
  if (diagnostic) {
    std::size_t i = 0;
    while (i < expected.size() && i < actual.size() && expected[i] == actual[i]) ++i;
    *diagnostic = name + " differs at byte " + std::to_string(i) + " (expected " + std::to_string(expected.size()) +
                  " bytes, got " + std::to_string(actual.size()) + ")";
  }
  return false;
}

/// Zero-noise synthetic campaign over `space` with the bump centred at `optimum`.
inline CampaignConfig synthetic_campaign(const ParameterSpace& space, double optimum = 0.7, double width = 2.0) {
  CampaignConfig cfg;
  cfg.space = space;
  cfg.executor.kind = ExecutorConfig::Kind::synthetic;
  cfg.executor.synthetic.base = 20000;
  cfg.executor.synthetic.optimum.assign(space.dimension(), optimum);
  cfg.executor.synthetic.widths.assign(space.dimension(), width);
  cfg.executor.synthetic.noise = 0.0;
  cfg.executor.synthetic.seed = 11;
  return cfg;
}

/// Shrinks the phase sizes so a campaign runs in a handful of trials.
inline CampaignConfig small_protocol(CampaignConfig cfg, std::size_t lhs = 8, std::size_t seeds = 2,
                                     std::size_t sa_iters = 5, std::size_t hc_iters = 5) {
  cfg.lhs_samples = lhs;
  cfg.lhs_repetitions = 1;
  cfg.max_seeds = seeds;
  cfg.seed_tolerance = 0.0;
  cfg.sa.iterations = sa_iters;
  cfg.hc.iterations = hc_iters;
  cfg.validation_repetitions = 2;
  return cfg;
}

/// Best objective each annealing seed reached (its starting sample included).
inline std::vector<double> annealing_bests(const CampaignState& state) {
  std::vector<double> out;
  for (std::size_t x : state.seeds) {
    double best = state.find(TrialId::sample(x), Phase::lhs)->objective;
    for (const auto& t : state.trials) {
      if (t.phase == Phase::annealing && *t.id.x == x && t.completed()) best = std::max(best, t.objective);
    }
    out.push_back(best);
  }
  return out;
}

/// The published protocol sizes: 30 LHS samples (best of 5 designs), 6
/// annealing seeds x 25 iterations, 17 hill-climbing iterations. The entry
/// gate is placed at the fifth-best annealing result of a dry run so exactly
/// five seeds are refined.
inline CampaignConfig full_protocol(CampaignConfig cfg, Executor& executor) {
  cfg.lhs_samples = 30;
  cfg.lhs_restarts = 5;
  cfg.lhs_repetitions = 3;
  cfg.seed_tolerance = 0.0;
  cfg.max_seeds = 6;
  cfg.sa.iterations = 25;
  cfg.sa.params_per_move = 2;
  cfg.sa.step_range = 0.10;
  cfg.hc.iterations = 17;
  cfg.hc.params_per_move = 1;
  cfg.validation_repetitions = 3;
  cfg.hc.entry_gate = std::nullopt;
  auto dry = cfg;
  dry.validation_repetitions = 0;
  dry.hc.iterations = 1;
  auto bests = annealing_bests(run_campaign(dry, executor));
  std::sort(bests.begin(), bests.end(), std::greater<>());
  cfg.hc.entry_gate = bests.at(4);
  return cfg;
}

/// Fixed campaign behind the report.md / trials.csv goldens.
inline CampaignConfig golden_report_config() {
  auto cfg = small_protocol(synthetic_campaign(kafka_space(), 0.6, 1.5), 10, 2, 6, 5);
  cfg.seed = 7;
  cfg.executor.synthetic.noise = 0.02;
  cfg.executor.synthetic.latency_ms = 25;
  return cfg;
}

/// The shipped default configuration as a three-repetition execution request.
inline ExperimentRequest default_request() {
  ExperimentRequest r;
  r.id = "c_default";
  r.config = kafka_space().default_config();
  r.repetitions = 3;
  return r;
}

inline std::string log_without_timestamps(const CampaignState& state) { return state_to_json(state, false).dump(1); }

}  // namespace cfgtune::testing
