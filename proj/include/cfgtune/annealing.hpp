#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <exception>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "cfgtune/errors.hpp"
#include "cfgtune/param_space.hpp"
#include "cfgtune/rng.hpp"

namespace cfgtune {

enum class EvalStatus { completed, terminated_early, failed };

/// What a search phase learns from measuring one proposal.
struct Evaluation {
  double objective = 0.0;
  EvalStatus status = EvalStatus::completed;
};

/// Objective callbacks return either a plain objective value or an Evaluation.
template <typename F>
concept ObjectiveFunction = std::invocable<F&, const NormalizedConfig&> &&
    (std::convertible_to<std::invoke_result_t<F&, const NormalizedConfig&>, double> ||
     std::same_as<std::invoke_result_t<F&, const NormalizedConfig&>, Evaluation>);

namespace detail {

template <ObjectiveFunction F>
Evaluation evaluate_guarded(F& f, const NormalizedConfig& u) {
  try {
    if constexpr (std::same_as<std::invoke_result_t<F&, const NormalizedConfig&>, Evaluation>) {
      return f(u);
    } else {
      return Evaluation{static_cast<double>(f(u)), EvalStatus::completed};
    }
  } catch (const ContractViolation&) {
    throw;
  } catch (const std::exception&) {
    return Evaluation{NAN, EvalStatus::failed};
  }
}

}  // namespace detail

struct TemperatureSchedule {
  double initial_temperature = 1.0;
  double cooling_rate = 0.95;

  void validate() const {
    if (!(initial_temperature > 0.0) || !std::isfinite(initial_temperature)) {
      throw ValidationError("initial temperature must be positive");
    }
    if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw ValidationError("cooling rate must lie in (0, 1)");
  }
};

struct SaSettings {
  std::size_t iterations = 25;
  std::size_t params_per_move = 2;
  double step_range = 0.10;
  TemperatureSchedule schedule;

  void validate(std::size_t dimension) const {
    if (iterations < 1) throw ValidationError("annealing iterations must be at least 1");
    if (params_per_move < 1 || params_per_move > dimension) {
      throw ValidationError("annealing params_per_move must lie in [1, dimension]");
    }
    if (!(step_range > 0.0 && step_range <= 1.0)) throw ValidationError("annealing step_range must lie in (0, 1]");
    schedule.validate();
  }
};

struct SaStep {
  std::size_t iteration = 0;  // 1-based
  NormalizedConfig proposal;
  double objective = 0.0;
  double temperature = 0.0;
  EvalStatus status = EvalStatus::completed;
  bool accepted = false;
};

struct SaTrace {
  std::vector<SaStep> steps;
  NormalizedConfig best_config;
  double best_objective = 0.0;
  std::size_t best_iteration = 0;  // 0 = the starting point
};

/// Temperature at which a loss of `accepted_loss` is accepted with
/// probability `acceptance_probability` under exp(-loss / T).
inline double initial_temperature(double accepted_loss, double acceptance_probability) {
  if (!(accepted_loss > 0.0)) throw ValidationError("accepted loss must be positive");
  if (!(acceptance_probability > 0.0 && acceptance_probability < 1.0)) {
    throw ValidationError("acceptance probability must lie in (0, 1)");
  }
  return accepted_loss / -std::log(acceptance_probability);
}

inline double temperature_at(const TemperatureSchedule& schedule, std::size_t k) {
  return schedule.initial_temperature * std::pow(schedule.cooling_rate, static_cast<double>(k));
}

/// 1 for non-worsening moves, exp(delta / T) otherwise.
inline double acceptance_probability(double delta, double temperature) {
  if (!(temperature > 0.0)) throw ContractViolation("acceptance_probability: temperature must be positive");
  if (delta >= 0.0) return 1.0;
  return std::exp(delta / temperature);
}

/// Perturbs exactly `m` distinct coordinates by Uniform[-step, +step], clamped to [0, 1].
inline NormalizedConfig propose_neighbor(const NormalizedConfig& u, std::size_t m, double step_range, Rng& rng) {
  if (m < 1 || m > u.size()) {
    throw ValidationError("params_per_move " + std::to_string(m) + " outside [1, " + std::to_string(u.size()) + "]");
  }
  std::vector<std::size_t> dims(u.size());
  std::iota(dims.begin(), dims.end(), std::size_t{0});
  // Partial Fisher-Yates: the first m entries are a uniform draw without replacement.
  for (std::size_t i = 0; i < m; ++i) {
    std::swap(dims[i], dims[i + rng.below(dims.size() - i)]);
  }
  NormalizedConfig next = u;
  for (std::size_t i = 0; i < m; ++i) {
    const double delta = rng.uniform(-step_range, step_range);
    next[dims[i]] = std::clamp(u[dims[i]] + delta, 0.0, 1.0);
  }
  return next;
}

/// Runs `settings.iterations` propose/evaluate/accept steps from `start`.
///
/// Early-terminated and failed evaluations are recorded but never become the
/// current solution. `best` only considers completed evaluations.
template <ObjectiveFunction F>
SaTrace sa_run(const NormalizedConfig& start, double start_objective, const SaSettings& settings, F&& evaluate,
               Rng& rng) {
  settings.validate(start.size());
  SaTrace trace;
  trace.best_config = start;
  trace.best_objective = start_objective;
  trace.steps.reserve(settings.iterations);

  NormalizedConfig current = start;
  double current_objective = start_objective;

  for (std::size_t k = 0; k < settings.iterations; ++k) {
    SaStep step;
    step.iteration = k + 1;
    step.temperature = temperature_at(settings.schedule, k);
    step.proposal = propose_neighbor(current, settings.params_per_move, settings.step_range, rng);
    const Evaluation result = detail::evaluate_guarded(evaluate, step.proposal);
    step.objective = result.objective;
    step.status = result.status;

    if (result.status == EvalStatus::completed) {
      const double delta = result.objective - current_objective;
      const double p = acceptance_probability(delta, step.temperature);
      step.accepted = p >= 1.0 || rng.uniform01() < p;
      if (step.accepted) {
        current = step.proposal;
        current_objective = result.objective;
      }
      if (result.objective > trace.best_objective) {
        trace.best_objective = result.objective;
        trace.best_config = step.proposal;
        trace.best_iteration = step.iteration;
      }
    }
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

}  // namespace cfgtune
