#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cfgtune/early_stop.hpp"
#include "cfgtune/errors.hpp"
#include "cfgtune/param_space.hpp"
#include "cfgtune/rng.hpp"

namespace cfgtune {

struct ExperimentRequest {
  std::string id;
  ConcreteConfig config;
  double duration_s = 480.0;
  double warmup_s = 180.0;
  double cadence_s = 5.0;
  std::size_t repetitions = 1;
  /// Reference throughput for early-stop rules; none disables early stopping.
  std::optional<double> baseline_throughput;

  void validate() const {
    if (!(duration_s > 0.0)) throw ValidationError("experiment duration must be positive");
    if (!(warmup_s >= 0.0 && warmup_s < duration_s)) throw ValidationError("warm-up must lie in [0, duration)");
    if (!(cadence_s > 0.0)) throw ValidationError("sample cadence must be positive");
    if (repetitions < 1) throw ValidationError("repetitions must be at least 1");
    if (config.values.empty()) throw ValidationError("experiment configuration is empty");
    if (baseline_throughput && !(*baseline_throughput > 0.0)) throw ValidationError("baseline throughput must be positive");
  }
};

enum class OutcomeStatus { completed, terminated_early, failed };

inline std::string_view to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::completed: return "completed";
    case OutcomeStatus::terminated_early: return "terminated_early";
    case OutcomeStatus::failed: return "failed";
  }
  return "failed";
}

struct LatencySummary {
  std::size_t count = 0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double max = 0.0;

  friend bool operator==(const LatencySummary&, const LatencySummary&) = default;
};

struct ExperimentOutcome {
  std::string request_id;
  OutcomeStatus status = OutcomeStatus::completed;
  /// Fired rule id when terminated early, failure reason when failed.
  std::string detail;
  /// Samples per repetition; the last one is partial after early termination.
  std::vector<std::vector<MetricSample>> samples;
  /// Post-warm-up mean throughput of each completed repetition.
  std::vector<double> repetition_means;
  /// Mean of repetition_means when completed; mean of every observed sample
  /// when terminated early; NaN when failed.
  double objective = NAN;
  std::optional<LatencySummary> latency;
  std::vector<std::string> warnings;
};

/// Receives each sample as it is produced; returning false cancels the run.
using SampleSink = std::function<bool(const MetricSample&)>;

struct RepetitionResult {
  enum class Status { completed, cancelled, failed } status = Status::completed;
  std::string reason;
  std::vector<std::string> warnings;
};

/// Runs a single repetition of an experiment and streams its samples.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual std::string name() const = 0;
  virtual RepetitionResult run(const ExperimentRequest& request, std::size_t repetition, const SampleSink& sink) = 0;
};

/// Mean throughput over samples taken at or after the warm-up.
inline std::optional<double> post_warmup_mean(const std::vector<MetricSample>& samples, double warmup_s) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (s.t >= warmup_s) {
      sum += s.throughput;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

inline std::optional<LatencySummary> summarize_latency(const std::vector<std::vector<MetricSample>>& runs,
                                                       double warmup_s) {
  std::vector<double> values;
  for (const auto& run : runs) {
    for (const auto& s : run) {
      if (s.t >= warmup_s && s.latency_ms) values.push_back(*s.latency_ms);
    }
  }
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  LatencySummary out;
  out.count = values.size();
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  out.p50 = quantile(0.50);
  out.p95 = quantile(0.95);
  out.max = values.back();
  return out;
}

/// Runs all repetitions of `request`, feeding every sample to `monitor`.
///
/// A fired stop rule cancels the executor and ends the experiment; remaining
/// repetitions are skipped. Executor failures and exceptions produce a failed
/// outcome rather than propagating.
inline ExperimentOutcome run_experiment(const ExperimentRequest& request, Executor& executor,
                                        EarlyStopMonitor monitor = {}) {
  request.validate();
  ExperimentOutcome outcome;
  outcome.request_id = request.id;

  for (std::size_t rep = 0; rep < request.repetitions; ++rep) {
    monitor.reset();
    outcome.samples.emplace_back();
    auto& series = outcome.samples.back();
    std::optional<std::string> fired;

    SampleSink sink = [&](const MetricSample& sample) {
      if (fired) return false;
      series.push_back(sample);
      StopDecision d = monitor.observe(sample);
      if (d.terminate) {
        fired = d.rule_id;
        return false;
      }
      return true;
    };

    RepetitionResult result;
    try {
      result = executor.run(request, rep, sink);
    } catch (const std::exception& e) {
      result.status = RepetitionResult::Status::failed;
      result.reason = e.what();
    }
    outcome.warnings.insert(outcome.warnings.end(), result.warnings.begin(), result.warnings.end());

    if (fired) {
      outcome.status = OutcomeStatus::terminated_early;
      outcome.detail = *fired;
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& run : outcome.samples) {
        for (const auto& s : run) {
          sum += s.throughput;
          ++n;
        }
      }
      outcome.objective = n ? sum / static_cast<double>(n) : 0.0;
      outcome.latency = summarize_latency(outcome.samples, 0.0);
      return outcome;
    }
    if (result.status != RepetitionResult::Status::completed) {
      outcome.status = OutcomeStatus::failed;
      outcome.detail = result.status == RepetitionResult::Status::cancelled ? "executor cancelled without a stop rule"
                                                                            : result.reason;
      return outcome;
    }
    auto mean = post_warmup_mean(series, request.warmup_s);
    if (!mean) {
      outcome.status = OutcomeStatus::failed;
      outcome.detail = "no samples after warm-up";
      return outcome;
    }
    outcome.repetition_means.push_back(*mean);
  }

  outcome.status = OutcomeStatus::completed;
  outcome.objective = std::accumulate(outcome.repetition_means.begin(), outcome.repetition_means.end(), 0.0) /
                      static_cast<double>(outcome.repetition_means.size());
  outcome.latency = summarize_latency(outcome.samples, request.warmup_s);
  return outcome;
}

/// Builds the monitor from `rules` and the request's baseline. Without a
/// baseline the rules are inert.
inline ExperimentOutcome run_experiment(const ExperimentRequest& request, Executor& executor,
                                        const std::vector<StopRule>& rules) {
  if (!request.baseline_throughput || rules.empty()) return run_experiment(request, executor, EarlyStopMonitor{});
  return run_experiment(request, executor, EarlyStopMonitor(rules, *request.baseline_throughput, request.warmup_s));
}

// ---------------------------------------------------------------------------
// Synthetic response surface

/// Gaussian bump over the normalized space:
///   throughput(u) = base * exp(-sum_i widths_i * (u_i - optimum_i)^2) * (1 + eps)
/// with eps ~ Normal(0, noise^2) drawn per sample.
struct SyntheticSurface {
  double base = 20000.0;
  std::vector<double> optimum;
  std::vector<double> widths;
  double noise = 0.0;
  std::uint64_t seed = 0;
  /// Latency at peak throughput; when set, samples carry latency that grows as throughput drops.
  std::optional<double> latency_ms;

  void validate(std::size_t dimension) const {
    if (!(base > 0.0)) throw ValidationError("synthetic surface base must be positive");
    if (optimum.size() != dimension || widths.size() != dimension) {
      throw ValidationError("synthetic surface optimum/widths must have one entry per parameter");
    }
    for (double o : optimum) {
      if (!(o >= 0.0 && o <= 1.0)) throw ValidationError("synthetic surface optimum must lie in [0, 1]");
    }
    for (double w : widths) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("synthetic surface widths must be non-negative");
    }
    if (!(noise >= 0.0)) throw ValidationError("synthetic surface noise must be non-negative");
    if (latency_ms && !(*latency_ms > 0.0)) throw ValidationError("synthetic surface latency must be positive");
  }

  /// Noise-free throughput.
  double mean_throughput(const NormalizedConfig& u) const {
    double exponent = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = u[i] - optimum[i];
      exponent += widths[i] * d * d;
    }
    return base * std::exp(-exponent);
  }
};

/// Pure executor over a SyntheticSurface: the same request always yields the
/// same samples, since noise is seeded from the configuration and repetition.
class SyntheticExecutor : public Executor {
 public:
  SyntheticExecutor(ParameterSpace space, SyntheticSurface surface)
      : space_(std::move(space)), surface_(std::move(surface)) {
    surface_.validate(space_.dimension());
  }

  std::string name() const override { return "synthetic"; }

  const SyntheticSurface& surface() const { return surface_; }

  RepetitionResult run(const ExperimentRequest& request, std::size_t repetition, const SampleSink& sink) override {
    const NormalizedConfig u = map_to_normalized(space_, request.config);
    const double level = surface_.mean_throughput(u);
    Rng rng(derive_seed(surface_.seed, "synthetic", config_hash(request.config) ^ repetition));
    const auto count = static_cast<std::size_t>(std::floor(request.duration_s / request.cadence_s + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
      MetricSample s;
      s.t = static_cast<double>(k) * request.cadence_s;
      const double eps = surface_.noise > 0.0 ? surface_.noise * rng.normal() : 0.0;
      s.throughput = std::max(0.0, level * (1.0 + eps));
      if (surface_.latency_ms) s.latency_ms = *surface_.latency_ms * (2.0 - std::min(1.0, s.throughput / surface_.base));
      if (!sink(s)) return {RepetitionResult::Status::cancelled, {}, {}};
    }
    return {};
  }

 private:
  static std::uint64_t config_hash(const ConcreteConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [name, value] : c.values) {
      h = detail::fnv1a(name, h);
      std::uint64_t bits = 0;
      std::memcpy(&bits, &value, sizeof bits);
      h = detail::splitmix64(h ^ bits);
    }
    return h;
  }

  ParameterSpace space_;
  SyntheticSurface surface_;
};

// ---------------------------------------------------------------------------
// Benchmark execution manifest

struct ManifestSettings {
  std::string api_version = "cfgtune.io/v1";
  std::string benchmark = "shufflebench-kstreams";
  std::string namespace_name;
};

/// Lower-case DNS-label form of an identifier: "c_{19,17}" -> "c-19-17".
inline std::string dns_label(std::string_view text) {
  std::string out;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "run" : out;
}

namespace detail {

inline std::string yaml_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// Custom-resource style YAML document describing one benchmark execution.
/// Output depends only on the inputs, so it can be compared byte-for-byte.
inline std::string render_execution_manifest(const ExperimentRequest& request, const ManifestSettings& settings = {}) {
  request.validate();
  std::string y;
  y += "apiVersion: " + settings.api_version + "\n";
  y += "kind: BenchmarkExecution\n";
  y += "metadata:\n";
  y += "  name: " + dns_label(settings.benchmark + "-" + request.id) + "\n";
  if (!settings.namespace_name.empty()) y += "  namespace: " + settings.namespace_name + "\n";
  y += "  labels:\n";
  y += "    cfgtune.io/trial: " + detail::yaml_quote(request.id) + "\n";
  y += "spec:\n";
  y += "  benchmark: " + settings.benchmark + "\n";
  y += "  repetitions: " + std::to_string(request.repetitions) + "\n";
  y += "  execution:\n";
  y += "    durationSeconds: " + format_number(request.duration_s) + "\n";
  y += "    warmupSeconds: " + format_number(request.warmup_s) + "\n";
  y += "  configOverrides:\n";
  for (const auto& [name, value] : request.config.values) {
    y += "    - parameter: " + name + "\n";
    y += "      value: " + detail::yaml_quote(format_number(value)) + "\n";
  }
  return y;
}

/// Config handoff text: one "name=value" line per parameter.
inline std::string render_config_file(const ConcreteConfig& config) {
  std::string out;
  for (const auto& [name, value] : config.values) out += name + "=" + format_number(value) + "\n";
  return out;
}

}  // namespace cfgtune
