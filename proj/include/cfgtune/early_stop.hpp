#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cfgtune/errors.hpp"

namespace cfgtune {

/// One observation from a running experiment.
struct MetricSample {
  double t = 0.0;           // seconds since run start
  double throughput = 0.0;  // records/s
  std::optional<double> latency_ms;

  friend bool operator==(const MetricSample&, const MetricSample&) = default;
};

/// Terminate once throughput stays below `fraction` x baseline for `sustain_s` seconds.
struct StopRule {
  std::string id;
  double fraction = 0.3;
  double sustain_s = 90.0;
  /// When false, samples taken before the warm-up ends neither start nor reset the breach clock.
  bool during_warmup = true;

  void validate() const {
    if (id.empty()) throw ValidationError("stop rule needs an id");
    if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("stop rule '" + id + "': fraction must lie in (0, 1)");
    if (!(sustain_s > 0.0)) throw ValidationError("stop rule '" + id + "': sustain_s must be positive");
  }

  friend bool operator==(const StopRule&, const StopRule&) = default;
};

/// The two rules used for the published Kafka Streams campaign.
inline std::vector<StopRule> default_stop_rules() {
  return {StopRule{"below-30pct-90s", 0.30, 90.0, true}, StopRule{"below-50pct-300s", 0.50, 300.0, true}};
}

struct StopDecision {
  bool terminate = false;
  std::string rule_id;
};

/// Per-run monitor. Breach duration is measured on sample timestamps from the
/// first breaching sample; any sample at or above the threshold resets the clock.
class EarlyStopMonitor {
 public:
  EarlyStopMonitor() = default;

  EarlyStopMonitor(std::vector<StopRule> rules, double baseline, double warmup_s = 0.0)
      : rules_(std::move(rules)), baseline_(baseline), warmup_s_(warmup_s), breach_start_(rules_.size()) {
    if (!rules_.empty() && !(baseline_ > 0.0)) throw ContractViolation("early-stop baseline must be positive");
    for (const auto& r : rules_) r.validate();
  }

  StopDecision observe(const MetricSample& sample) {
    if (fired_) return {true, *fired_};
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const StopRule& rule = rules_[i];
      if (!rule.during_warmup && sample.t < warmup_s_) continue;
      if (sample.throughput < rule.fraction * baseline_) {
        if (!breach_start_[i]) breach_start_[i] = sample.t;
      } else {
        breach_start_[i].reset();
      }
    }
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      if (breach_start_[i] && sample.t - *breach_start_[i] >= rules_[i].sustain_s) {
        fired_ = rules_[i].id;
        return {true, *fired_};
      }
    }
    return {};
  }

  void reset() {
    fired_.reset();
    for (auto& b : breach_start_) b.reset();
  }

  const std::vector<StopRule>& rules() const { return rules_; }
  double baseline() const { return baseline_; }
  std::optional<double> breach_start(std::size_t rule) const { return breach_start_.at(rule); }

 private:
  std::vector<StopRule> rules_;
  double baseline_ = 1.0;
  double warmup_s_ = 0.0;
  std::vector<std::optional<double>> breach_start_;
  std::optional<std::string> fired_;
};

}  // namespace cfgtune
