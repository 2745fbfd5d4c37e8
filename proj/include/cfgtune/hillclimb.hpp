#pragma once

#include <optional>
#include <vector>

#include "cfgtune/annealing.hpp"
#include "cfgtune/errors.hpp"
#include "cfgtune/param_space.hpp"
#include "cfgtune/rng.hpp"

namespace cfgtune {

struct HcSettings {
  std::size_t iterations = 17;
  std::size_t params_per_move = 1;
  double step_range = 0.10;
  /// Seeds whose best objective stays below this are not refined.
  std::optional<double> entry_gate;

  void validate(std::size_t dimension) const {
    if (iterations < 1) throw ValidationError("hill-climbing iterations must be at least 1");
    if (params_per_move < 1 || params_per_move > dimension) {
      throw ValidationError("hill-climbing params_per_move must lie in [1, dimension]");
    }
    if (!(step_range > 0.0 && step_range <= 1.0)) throw ValidationError("hill-climbing step_range must lie in (0, 1]");
  }
};

struct HcStep {
  std::size_t iteration = 0;  // 1-based
  NormalizedConfig proposal;
  double objective = 0.0;
  EvalStatus status = EvalStatus::completed;
  bool accepted = false;
};

struct HcTrace {
  std::vector<HcStep> steps;
  NormalizedConfig best_config;
  double best_objective = 0.0;
  std::size_t best_iteration = 0;  // 0 = the starting point
};

/// Improvement-only local search: a proposal replaces the current solution
/// only if its objective is strictly greater.
template <ObjectiveFunction F>
HcTrace hc_run(const NormalizedConfig& start, double start_objective, const HcSettings& settings, F&& evaluate,
               Rng& rng) {
  settings.validate(start.size());
  HcTrace trace;
  trace.best_config = start;
  trace.best_objective = start_objective;
  trace.steps.reserve(settings.iterations);

  for (std::size_t k = 0; k < settings.iterations; ++k) {
    HcStep step;
    step.iteration = k + 1;
    step.proposal = propose_neighbor(trace.best_config, settings.params_per_move, settings.step_range, rng);
    const Evaluation result = detail::evaluate_guarded(evaluate, step.proposal);
    step.objective = result.objective;
    step.status = result.status;
    step.accepted = result.status == EvalStatus::completed && result.objective > trace.best_objective;
    if (step.accepted) {
      trace.best_config = step.proposal;
      trace.best_objective = result.objective;
      trace.best_iteration = step.iteration;
    }
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

struct ScoredConfig {
  NormalizedConfig config;
  double objective = 0.0;
};

/// Keeps candidates with objective >= threshold, preserving order.
template <typename Candidate = ScoredConfig>
std::vector<Candidate> gate_seeds(const std::vector<Candidate>& candidates, double threshold) {
  std::vector<Candidate> kept;
  for (const auto& c : candidates) {
    if (c.objective >= threshold) kept.push_back(c);
  }
  return kept;
}

}  // namespace cfgtune
