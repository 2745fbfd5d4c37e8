#pragma once

#include <string_view>

namespace cfgtune::bundled {

// Nine Kafka Streams parameters with their shipped defaults. Bounds cover
// every value seen in published tuning runs of this space; seven dimensions
// are searched on a logarithmic scale.
inline constexpr std::string_view kafka_streams_space = R"(# Kafka Streams tuning space.
# Grammar: one [parameter] block per dimension; fields name, min, max,
# scale (linear|log), type (integer|real), unit, default.

[parameter]
name    = cache.max.bytes.buffering
min     = 1
max     = 536870912
scale   = log
type    = integer
unit    = bytes
default = 10485760

[parameter]
name    = buffered.records.per.partition
min     = 1
max     = 2147483647
scale   = log
type    = integer
unit    = records
default = 1000

[parameter]
name    = consumer.fetch.min.bytes
min     = 1
max     = 268435456
scale   = log
type    = integer
unit    = bytes
default = 1

[parameter]
name    = commit.interval.ms
min     = 0
max     = 10000
scale   = linear
type    = integer
unit    = ms
default = 5000

[parameter]
name    = producer.linger.ms
min     = 0
max     = 500
scale   = linear
type    = integer
unit    = ms
default = 0

[parameter]
name    = consumer.max.partition.fetch.bytes
min     = 1024
max     = 512000000
scale   = log
type    = integer
unit    = bytes
default = 1048576

[parameter]
name    = producer.batch.size
min     = 1
max     = 1048576
scale   = log
type    = integer
unit    = bytes
default = 16384

[parameter]
name    = consumer.max.poll.records
min     = 1
max     = 2147483647
scale   = log
type    = integer
unit    = records
default = 500

[parameter]
name    = rocksdb.write.buffer.size
min     = 1048576
max     = 2147483647
scale   = log
type    = integer
unit    = bytes
default = 4194304
)";

// Demo campaign over the space above, measured by the synthetic executor.
// Switch "executor" to {"type": "command", "command": {"template": ...}}
// to drive a real benchmark.
inline constexpr std::string_view demo_campaign = R"({
  "space": "kafka-streams.space",
  "seed": 42,
  "executor": {
    "type": "synthetic",
    "synthetic": {
      "base": 24000,
      "optimum": [0.62, 0.55, 0.30, 0.45, 0.70, 0.40, 0.35, 0.58, 0.50],
      "widths": [2.5, 1.0, 3.0, 0.5, 2.0, 1.5, 4.0, 0.8, 1.2],
      "noise": 0.02,
      "seed": 7,
      "latency_ms": 40
    }
  },
  "experiment": { "duration_s": 480, "warmup_s": 180, "cadence_s": 5 },
  "manifest": { "benchmark": "shufflebench-kstreams" },
  "phases": {
    "lhs": { "samples": 30, "restarts": 5, "repetitions": 3 },
    "seed_selection": { "tolerance": 0.95, "max_seeds": 6 },
    "annealing": {
      "iterations": 25,
      "params_per_move": 2,
      "step_range": 0.1,
      "cooling_rate": 0.95,
      "accepted_loss": 2500,
      "acceptance_probability": 0.75
    },
    "hill_climbing": { "iterations": 17, "params_per_move": 1, "step_range": 0.05 },
    "validation": { "repetitions": 3 }
  },
  "early_stop": [
    { "id": "below-30pct-90s", "fraction": 0.3, "sustain_s": 90 },
    { "id": "below-50pct-300s", "fraction": 0.5, "sustain_s": 300 }
  ]
}
)";

}  // namespace cfgtune::bundled
