#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "cfgtune/annealing.hpp"
#include "cfgtune/command_executor.hpp"
#include "cfgtune/early_stop.hpp"
#include "cfgtune/errors.hpp"
#include "cfgtune/execution.hpp"
#include "cfgtune/hillclimb.hpp"
#include "cfgtune/param_space.hpp"
#include "cfgtune/rng.hpp"
#include "cfgtune/sampling.hpp"

namespace cfgtune {

// ---------------------------------------------------------------------------
// Trial identifiers

/// Lineage of a configuration: LHS sample x, annealing iteration y,
/// hill-climbing iteration z. y == 0 marks an annealing run whose best point
/// was its own starting sample.
struct TrialId {
  std::optional<std::size_t> x, y, z;
  bool is_default = false;

  static TrialId baseline() { return TrialId{std::nullopt, std::nullopt, std::nullopt, true}; }
  static TrialId sample(std::size_t x) { return TrialId{x, std::nullopt, std::nullopt, false}; }
  static TrialId annealed(std::size_t x, std::size_t y) { return TrialId{x, y, std::nullopt, false}; }
  static TrialId climbed(std::size_t x, std::size_t y, std::size_t z) { return TrialId{x, y, z, false}; }

  bool valid() const {
    if (is_default) return !x && !y && !z;
    return x && (!z || y);
  }

  /// "c_default", "c_19", "c_{19,17}", "c_{19,17,16}".
  std::string render() const {
    if (is_default) return "c_default";
    if (!valid()) throw ContractViolation("malformed trial id");
    if (!y) return "c_" + std::to_string(*x);
    std::string s = "c_{" + std::to_string(*x) + "," + std::to_string(*y);
    if (z) s += "," + std::to_string(*z);
    return s + "}";
  }

  static std::optional<TrialId> parse(std::string_view text) {
    if (text == "c_default") return baseline();
    if (text.substr(0, 2) != "c_") return std::nullopt;
    text.remove_prefix(2);
    bool braced = !text.empty() && text.front() == '{';
    if (braced) {
      if (text.back() != '}') return std::nullopt;
      text = text.substr(1, text.size() - 2);
    }
    std::vector<std::size_t> parts;
    while (true) {
      auto comma = text.find(',');
      auto field = text.substr(0, comma);
      std::size_t v = 0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) return std::nullopt;
      parts.push_back(v);
      if (comma == std::string_view::npos) break;
      text.remove_prefix(comma + 1);
    }
    if (parts.size() > 3 || (parts.size() > 1 && !braced) || (parts.size() == 1 && braced)) return std::nullopt;
    TrialId id;
    id.x = parts[0];
    if (parts.size() > 1) id.y = parts[1];
    if (parts.size() > 2) id.z = parts[2];
    return id;
  }

  friend bool operator==(const TrialId&, const TrialId&) = default;
};

enum class Phase { baseline, lhs, annealing, hill_climbing, validation };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::baseline: return "baseline";
    case Phase::lhs: return "lhs";
    case Phase::annealing: return "annealing";
    case Phase::hill_climbing: return "hill_climbing";
    case Phase::validation: return "validation";
  }
  return "baseline";
}

inline std::optional<Phase> parse_phase(std::string_view s) {
  for (Phase p : {Phase::baseline, Phase::lhs, Phase::annealing, Phase::hill_climbing, Phase::validation}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

/// One logged experiment.
struct Trial {
  TrialId id;
  Phase phase = Phase::baseline;
  NormalizedConfig normalized;
  ConcreteConfig config;
  std::size_t repetitions = 1;
  OutcomeStatus status = OutcomeStatus::completed;
  std::string detail;
  double objective = NAN;
  std::vector<double> repetition_means;
  std::size_t sample_count = 0;
  std::optional<double> ended_at_s;
  std::optional<LatencySummary> latency;
  std::vector<std::string> warnings;
  /// Search decision for annealing / hill-climbing proposals.
  std::optional<bool> accepted;
  std::optional<double> temperature;
  std::string started_at;
  std::string finished_at;

  bool completed() const { return status == OutcomeStatus::completed; }
};

// ---------------------------------------------------------------------------
// Configuration

struct ExecutorConfig {
  enum class Kind { synthetic, command } kind = Kind::synthetic;
  SyntheticSurface synthetic;
  CommandExecutor::Settings command;
};

struct CampaignConfig {
  std::string space_path;
  ParameterSpace space;
  ExecutorConfig executor;
  ManifestSettings manifest;

  double duration_s = 480.0;
  double warmup_s = 180.0;
  double cadence_s = 5.0;

  std::size_t lhs_samples = 30;
  std::size_t lhs_restarts = 5;
  std::size_t lhs_repetitions = 3;

  double seed_tolerance = 0.95;
  std::size_t max_seeds = 6;

  SaSettings sa;
  /// When both are set, the annealing start temperature is derived from them.
  std::optional<double> sa_accepted_loss = 2500.0;
  std::optional<double> sa_acceptance_probability = 0.75;
  std::size_t sa_repetitions = 1;

  HcSettings hc;
  std::size_t hc_repetitions = 1;

  std::size_t validation_repetitions = 3;

  std::vector<StopRule> stop_rules = default_stop_rules();
  std::uint64_t seed = 1;

  CampaignConfig() {
    sa.schedule.initial_temperature = initial_temperature(2500.0, 0.75);
    hc.entry_gate = std::nullopt;
  }

  /// Re-derives the annealing start temperature from the loss/probability pair when set.
  void resolve_temperature() {
    if (sa_accepted_loss && sa_acceptance_probability) {
      sa.schedule.initial_temperature = initial_temperature(*sa_accepted_loss, *sa_acceptance_probability);
    }
  }

  void validate() const {
    if (space.dimension() == 0) throw ValidationError("campaign config: parameter space is empty");
    if (!space.has_defaults()) throw ValidationError("campaign config: every parameter needs a default value for the baseline");
    if (executor.kind == ExecutorConfig::Kind::synthetic) executor.synthetic.validate(space.dimension());
    if (!(duration_s > 0.0)) throw ValidationError("campaign config: duration_s must be positive");
    if (!(warmup_s >= 0.0 && warmup_s < duration_s)) throw ValidationError("campaign config: warmup_s must lie in [0, duration_s)");
    if (!(cadence_s > 0.0)) throw ValidationError("campaign config: cadence_s must be positive");
    if (lhs_samples < 2) throw ValidationError("campaign config: lhs.samples must be at least 2");
    if (lhs_restarts < 1) throw ValidationError("campaign config: lhs.restarts must be at least 1");
    if (lhs_repetitions < 1 || sa_repetitions < 1 || hc_repetitions < 1) {
      throw ValidationError("campaign config: repetitions must be at least 1");
    }
    if (!(seed_tolerance >= 0.0)) throw ValidationError("campaign config: seed_selection.tolerance must be non-negative");
    if (max_seeds < 1) throw ValidationError("campaign config: seed_selection.max_seeds must be at least 1");
    sa.validate(space.dimension());
    hc.validate(space.dimension());
    for (const auto& r : stop_rules) r.validate();
  }
};

// ---------------------------------------------------------------------------
// State

struct ValidationReport {
  TrialId start_id;
  TrialId best_id;
  std::vector<double> start_runs;
  std::vector<double> best_runs;
  double start_mean = NAN;
  double best_mean = NAN;
  /// (best_mean - start_mean) / start_mean
  double relative_difference = NAN;
  /// (max - min) / mean over each configuration's runs.
  double start_spread = NAN;
  double best_spread = NAN;
};

struct CampaignState {
  static constexpr int format_version = 1;

  CampaignConfig config;
  std::vector<Trial> trials;
  std::optional<double> baseline;
  std::vector<std::size_t> seeds;
  bool seed_fallback = false;
  std::vector<std::string> notes;
  std::optional<ValidationReport> validation;
  Phase phase = Phase::baseline;
  bool complete = false;

  const Trial* find(const TrialId& id, std::optional<Phase> phase_filter = std::nullopt) const {
    for (const auto& t : trials) {
      if (t.id == id && (!phase_filter || t.phase == *phase_filter)) return &t;
    }
    return nullptr;
  }

  /// Best completed trial outside validation.
  const Trial* best() const {
    const Trial* best = nullptr;
    for (const auto& t : trials) {
      if (t.phase == Phase::validation || !t.completed()) continue;
      if (!best || t.objective > best->objective) best = &t;
    }
    return best;
  }

  std::size_t count(Phase p) const {
    return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [p](const Trial& t) { return t.phase == p; }));
  }
};

// ---------------------------------------------------------------------------
// Seed selection

struct SeedCandidate {
  std::size_t x = 0;
  double objective = NAN;
  OutcomeStatus status = OutcomeStatus::completed;
};

struct SeedSelection {
  std::vector<std::size_t> seeds;  // LHS indices, best first
  bool fallback = false;
};

/// Completed candidates with objective >= tolerance * baseline, best first,
/// at most `cap`. When none qualify, the best `cap` completed candidates are
/// returned and `fallback` is set.
inline SeedSelection select_seeds(const std::vector<SeedCandidate>& candidates, double baseline, double tolerance,
                                  std::size_t cap) {
  std::vector<SeedCandidate> completed;
  for (const auto& c : candidates) {
    if (c.status == OutcomeStatus::completed && std::isfinite(c.objective)) completed.push_back(c);
  }
  std::stable_sort(completed.begin(), completed.end(),
                   [](const SeedCandidate& a, const SeedCandidate& b) { return a.objective > b.objective; });
  SeedSelection out;
  for (const auto& c : completed) {
    if (c.objective >= tolerance * baseline && out.seeds.size() < cap) out.seeds.push_back(c.x);
  }
  if (out.seeds.empty() && !completed.empty()) {
    out.fallback = true;
    for (std::size_t i = 0; i < completed.size() && i < cap; ++i) out.seeds.push_back(completed[i].x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Running

/// Thrown when a run stops early at the caller's request; the state passed to
/// the persist hook is resumable.
class CampaignInterrupted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  /// Called after every state change; typically writes the state file.
  std::function<void(const CampaignState&)> persist;
  /// Called after every newly executed (not replayed) trial.
  std::function<void(const Trial&)> on_trial;
  /// Interrupt once the log holds this many trials.
  std::optional<std::size_t> stop_after_trials;
  /// Source of wall-clock timestamps; replaced in tests.
  std::function<std::string()> clock;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::unique_ptr<Executor> make_executor(const CampaignConfig& config) {
  if (config.executor.kind == ExecutorConfig::Kind::synthetic) {
    return std::make_unique<SyntheticExecutor>(config.space, config.executor.synthetic);
  }
  return std::make_unique<CommandExecutor>(config.executor.command);
}

namespace detail {

class CampaignRunner {
 public:
  CampaignRunner(CampaignState& state, Executor& executor, std::vector<Trial> replay, const RunOptions& options)
      : state_(state), executor_(executor), replay_(std::move(replay)), options_(options) {}

  void run() {
    const CampaignConfig& cfg = state_.config;
    const std::size_t d = cfg.space.dimension();

    // Baseline: the shipped default configuration, measured without early stopping.
    state_.phase = Phase::baseline;
    const NormalizedConfig default_u = map_to_normalized(cfg.space, cfg.space.default_config());
    const Trial& base = trial(TrialId::baseline(), Phase::baseline, default_u, cfg.lhs_repetitions, false);
    if (!base.completed() || !(base.objective > 0.0)) {
      throw RuntimeFailure("baseline measurement failed: " + (base.detail.empty() ? "no throughput" : base.detail));
    }
    state_.baseline = base.objective;

    // Phase 1: maximin Latin hypercube.
    state_.phase = Phase::lhs;
    const auto design = maximin_lhs(cfg.lhs_samples, d, cfg.lhs_restarts, derive_seed(cfg.seed, "lhs"));
    std::vector<SeedCandidate> candidates;
    for (std::size_t i = 0; i < design.samples.size(); ++i) {
      const Trial& t = trial(TrialId::sample(i + 1), Phase::lhs, design.samples[i], cfg.lhs_repetitions, true);
      candidates.push_back({i + 1, t.objective, t.status});
    }

    const SeedSelection selection = select_seeds(candidates, *state_.baseline, cfg.seed_tolerance, cfg.max_seeds);
    state_.seeds = selection.seeds;
    state_.seed_fallback = selection.fallback;
    if (selection.fallback) {
      note("no sample reached " + format_number(cfg.seed_tolerance) +
           " x baseline; continuing from the best completed samples");
    }
    if (selection.seeds.empty()) note("no completed sample to continue from; annealing and hill climbing skipped");

    // Phase 2: simulated annealing from every seed.
    state_.phase = Phase::annealing;
    struct HcStart {
      std::size_t x, y;
      NormalizedConfig config;
      double objective;
    };
    std::vector<HcStart> starts;
    for (std::size_t x : selection.seeds) {
      const NormalizedConfig& u = design.samples[x - 1];
      const double start_objective = candidates[x - 1].objective;
      Rng rng(derive_seed(cfg.seed, "annealing", x));
      std::size_t y = 0;
      std::vector<std::size_t> logged;
      auto evaluate = latched([&](const NormalizedConfig& proposal) {
        ++y;
        const Trial& t = trial(TrialId::annealed(x, y), Phase::annealing, proposal, cfg.sa_repetitions, true);
        logged.push_back(index_of(t));
        return as_evaluation(t);
      });
      const SaTrace trace = sa_run(u, start_objective, cfg.sa, evaluate, rng);
      rethrow_latched();
      for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        Trial& t = state_.trials[logged[i]];
        t.accepted = trace.steps[i].accepted;
        t.temperature = trace.steps[i].temperature;
      }
      persist();
      starts.push_back({x, trace.best_iteration, trace.best_config, trace.best_objective});
    }

    // Phase 3: hill climbing from each seed's best annealing point that passes the gate.
    state_.phase = Phase::hill_climbing;
    const double gate = cfg.hc.entry_gate.value_or(-std::numeric_limits<double>::infinity());
    const auto gated = gate_seeds(starts, gate);
    for (const auto& s : starts) {
      if (s.objective < gate) {
        note("c_" + std::to_string(s.x) + " excluded from hill climbing: best " + format_number(s.objective) +
             " below entry gate " + format_number(gate));
      }
    }
    struct Climbed {
      TrialId start_id, best_id;
      NormalizedConfig start, best;
      double best_objective;
    };
    std::optional<Climbed> overall;
    for (const auto& s : gated) {
      Rng rng(derive_seed(cfg.seed, "hill_climbing", s.x));
      std::size_t z = 0;
      std::vector<std::size_t> logged;
      auto evaluate = latched([&](const NormalizedConfig& proposal) {
        ++z;
        const Trial& t = trial(TrialId::climbed(s.x, s.y, z), Phase::hill_climbing, proposal, cfg.hc_repetitions, true);
        logged.push_back(index_of(t));
        return as_evaluation(t);
      });
      const HcTrace trace = hc_run(s.config, s.objective, cfg.hc, evaluate, rng);
      rethrow_latched();
      for (std::size_t i = 0; i < trace.steps.size(); ++i) state_.trials[logged[i]].accepted = trace.steps[i].accepted;
      persist();
      const TrialId start_id = s.y == 0 ? TrialId::sample(s.x) : TrialId::annealed(s.x, s.y);
      const TrialId best_id = trace.best_iteration == 0 ? start_id : TrialId::climbed(s.x, s.y, trace.best_iteration);
      if (!overall || trace.best_objective > overall->best_objective) {
        overall = Climbed{start_id, best_id, s.config, trace.best_config, trace.best_objective};
      }
    }

    // Re-measure the overall hill-climbing best against its starting point.
    if (overall && cfg.validation_repetitions > 0) {
      state_.phase = Phase::validation;
      validate(overall->start_id, overall->start, overall->best_id, overall->best, cfg.validation_repetitions);
    }

    const Trial* best = state_.best();
    if (best && state_.baseline && !(best->objective > *state_.baseline)) {
      note("no configuration improved on the baseline");
    }
    state_.complete = true;
    persist();
  }

  ValidationReport validate(const TrialId& start_id, const NormalizedConfig& start, const TrialId& best_id,
                            const NormalizedConfig& best, std::size_t repetitions) {
    const Trial& a = trial(start_id, Phase::validation, start, repetitions, false);
    const std::size_t a_index = index_of(a);
    const Trial& b = trial(best_id, Phase::validation, best, repetitions, false);
    const Trial& a_ref = state_.trials[a_index];

    ValidationReport report;
    report.start_id = start_id;
    report.best_id = best_id;
    report.start_runs = a_ref.repetition_means;
    report.best_runs = b.repetition_means;
    auto stats = [](const std::vector<double>& runs, double& mean, double& spread) {
      if (runs.empty()) return;
      mean = 0.0;
      for (double r : runs) mean += r;
      mean /= static_cast<double>(runs.size());
      const auto [lo, hi] = std::minmax_element(runs.begin(), runs.end());
      spread = mean != 0.0 ? (*hi - *lo) / mean : NAN;
    };
    stats(report.start_runs, report.start_mean, report.start_spread);
    stats(report.best_runs, report.best_mean, report.best_spread);
    if (std::isfinite(report.start_mean) && report.start_mean != 0.0) {
      report.relative_difference = (report.best_mean - report.start_mean) / report.start_mean;
    }
    state_.validation = report;
    persist();
    return report;
  }

 private:
  std::size_t index_of(const Trial& t) const { return static_cast<std::size_t>(&t - state_.trials.data()); }

  static Evaluation as_evaluation(const Trial& t) {
    switch (t.status) {
      case OutcomeStatus::completed: return {t.objective, EvalStatus::completed};
      case OutcomeStatus::terminated_early: return {t.objective, EvalStatus::terminated_early};
      case OutcomeStatus::failed: return {NAN, EvalStatus::failed};
    }
    return {NAN, EvalStatus::failed};
  }

  // The search loops treat a throwing objective as a failed evaluation. Campaign
  // errors (interrupts, replay mismatches) must abort instead, so the first one
  // is parked here, later calls short-circuit, and it is rethrown afterwards.
  template <typename F>
  std::function<Evaluation(const NormalizedConfig&)> latched(F f) {
    return [this, f](const NormalizedConfig& u) mutable -> Evaluation {
      if (latched_) return {NAN, EvalStatus::failed};
      try {
        return f(u);
      } catch (...) {
        latched_ = std::current_exception();
        return {NAN, EvalStatus::failed};
      }
    };
  }

  void rethrow_latched() {
    if (auto e = std::exchange(latched_, nullptr)) std::rethrow_exception(e);
  }

  void note(std::string text) {
    if (std::find(state_.notes.begin(), state_.notes.end(), text) == state_.notes.end()) {
      state_.notes.push_back(std::move(text));
    }
  }

  void persist() {
    if (options_.persist) options_.persist(state_);
  }

  const Trial& trial(const TrialId& id, Phase phase, const NormalizedConfig& u, std::size_t repetitions,
                     bool early_stop) {
    const CampaignConfig& cfg = state_.config;
    const std::size_t index = state_.trials.size();
    ConcreteConfig concrete = map_to_concrete(cfg.space, u);

    if (index < replay_.size()) {
      Trial logged = replay_[index];
      if (!(logged.id == id) || logged.phase != phase || !(logged.config == concrete) || !(logged.normalized == u)) {
        throw StateCorruption("trial " + std::to_string(index) + " in the state log (" + logged.id.render() + ", " +
                              std::string(to_string(logged.phase)) + ") does not match the replayed campaign (" +
                              id.render() + ", " + std::string(to_string(phase)) + ")");
      }
      state_.trials.push_back(std::move(logged));
      return state_.trials.back();
    }
    if (options_.stop_after_trials && index >= *options_.stop_after_trials) {
      persist();
      throw CampaignInterrupted("campaign interrupted after " + std::to_string(index) + " trials");
    }

    ExperimentRequest request;
    request.id = id.render();
    request.config = concrete;
    request.duration_s = cfg.duration_s;
    request.warmup_s = cfg.warmup_s;
    request.cadence_s = cfg.cadence_s;
    request.repetitions = repetitions;
    if (early_stop) request.baseline_throughput = state_.baseline;

    Trial t;
    t.id = id;
    t.phase = phase;
    t.normalized = u;
    t.config = std::move(concrete);
    t.repetitions = repetitions;
    t.started_at = timestamp();
    const ExperimentOutcome outcome = run_experiment(request, executor_, cfg.stop_rules);
    t.finished_at = timestamp();
    t.status = outcome.status;
    t.detail = outcome.detail;
    t.objective = outcome.objective;
    t.repetition_means = outcome.repetition_means;
    t.latency = outcome.latency;
    t.warnings = outcome.warnings;
    for (const auto& run : outcome.samples) t.sample_count += run.size();
    if (!outcome.samples.empty() && !outcome.samples.back().empty()) t.ended_at_s = outcome.samples.back().back().t;

    state_.trials.push_back(std::move(t));
    persist();
    if (options_.on_trial) options_.on_trial(state_.trials.back());
    return state_.trials.back();
  }

  std::string timestamp() const { return options_.clock ? options_.clock() : utc_timestamp(); }

  CampaignState& state_;
  Executor& executor_;
  std::vector<Trial> replay_;
  const RunOptions& options_;
  std::exception_ptr latched_;
};

}  // namespace detail

/// Baseline, maximin LHS, seed selection, annealing per seed, gated hill
/// climbing, and validation of the overall best, in that order. Trials run
/// one at a time and the persist hook sees the state after each of them.
inline CampaignState run_campaign(const CampaignConfig& config, Executor& executor, const RunOptions& options = {}) {
  config.validate();
  CampaignState state;
  state.config = config;
  detail::CampaignRunner runner(state, executor, {}, options);
  runner.run();
  return state;
}

inline CampaignState run_campaign(const CampaignConfig& config, const RunOptions& options = {}) {
  auto executor = make_executor(config);
  return run_campaign(config, *executor, options);
}

/// Continues a persisted campaign. Logged trials are replayed rather than
/// re-executed, so a pure executor yields the same log as an uninterrupted run.
inline CampaignState resume_campaign(const CampaignState& previous, Executor& executor, const RunOptions& options = {}) {
  previous.config.validate();
  CampaignState state;
  state.config = previous.config;
  detail::CampaignRunner runner(state, executor, previous.trials, options);
  runner.run();
  if (state.trials.size() < previous.trials.size()) {
    throw StateCorruption("state log holds more trials than the campaign produces");
  }
  return state;
}

inline CampaignState resume_campaign(const CampaignState& previous, const RunOptions& options = {}) {
  auto executor = make_executor(previous.config);
  return resume_campaign(previous, *executor, options);
}

/// Re-runs the overall hill-climbing best and its starting configuration
/// `repetitions` times each and appends both trials to the state.
inline ValidationReport validate_best(CampaignState& state, std::size_t repetitions, Executor& executor,
                                      const RunOptions& options = {}) {
  if (repetitions < 1) throw ValidationError("validation repetitions must be at least 1");
  struct Group {
    TrialId start_id, best_id;
    NormalizedConfig start_u, best_u;
    double best_objective;
  };
  std::optional<Group> overall;
  std::vector<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& t : state.trials) {
    if (t.phase != Phase::hill_climbing) continue;
    const std::pair<std::size_t, std::size_t> key{*t.id.x, *t.id.y};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);

    const TrialId start_id = key.second == 0 ? TrialId::sample(key.first) : TrialId::annealed(key.first, key.second);
    const Trial* start = state.find(start_id, key.second == 0 ? Phase::lhs : Phase::annealing);
    if (!start) throw StateCorruption("hill-climbing start " + start_id.render() + " missing from the log");
    Group g{start_id, start_id, start->normalized, start->normalized, start->objective};
    for (const auto& h : state.trials) {
      if (h.phase == Phase::hill_climbing && *h.id.x == key.first && *h.id.y == key.second && h.completed() &&
          h.objective > g.best_objective) {
        g.best_id = h.id;
        g.best_u = h.normalized;
        g.best_objective = h.objective;
      }
    }
    if (!overall || g.best_objective > overall->best_objective) overall = g;
  }
  if (!overall) throw ValidationError("campaign has no hill-climbing trials to validate");
  detail::CampaignRunner runner(state, executor, {}, options);
  return runner.validate(overall->start_id, overall->start_u, overall->best_id, overall->best_u, repetitions);
}

}  // namespace cfgtune
