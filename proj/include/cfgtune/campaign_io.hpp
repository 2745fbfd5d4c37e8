#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cfgtune/campaign.hpp"
#include "cfgtune/errors.hpp"

namespace cfgtune {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Files

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Writes via a sibling temporary file and rename, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeFailure("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw RuntimeFailure("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw RuntimeFailure("cannot replace '" + path.string() + "': " + ec.message());
}

/// Exclusive advisory lock on "<state>.lock" for the lifetime of the object.
class StateLock {
 public:
  explicit StateLock(const std::filesystem::path& state_path) : path_(state_path.string() + ".lock") {
    if (state_path.has_parent_path()) std::filesystem::create_directories(state_path.parent_path());
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw RuntimeFailure("cannot open lock file '" + path_ + "'");
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      throw RuntimeFailure("state '" + state_path.string() + "' is in use by another campaign");
    }
  }
  StateLock(const StateLock&) = delete;
  StateLock& operator=(const StateLock&) = delete;
  ~StateLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }

 private:
  std::string path_;
  int fd_ = -1;
};

// ---------------------------------------------------------------------------
// JSON helpers

namespace detail {

/// Typed, path-aware access into a JSON object that rejects unknown keys.
class JsonReader {
 public:
  JsonReader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("expected an object");
  }

  /// Rejects fields that were never read.
  void done() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) throw ValidationError(where(it.key()) + ": unknown field");
    }
  }

  void ignore(const std::string& key) { seen_.insert(key); }

  bool has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) fail(key, "missing required field");
    return node_.at(key);
  }

  JsonReader object(const std::string& key) { return JsonReader(raw(key), where(key)); }

  double number(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    return has(key) ? number(key) : fallback;
  }
  std::optional<double> optional_number(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::uint64_t unsigned_int(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
    seen_.insert(key);
    return has(key) ? unsigned_int(key) : fallback;
  }

  std::string string(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    return has(key) ? string(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const Json& v = node_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const { throw ValidationError(where(key) + ": " + why); }
  [[noreturn]] void fail(const std::string& why) const { throw ValidationError(path_ + ": " + why); }
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const Json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline double number_from(const Json& v) { return v.is_null() ? NAN : v.get<double>(); }

inline ParameterDefinition parameter_from_json(const Json& j, const std::string& path) {
  JsonReader r(j, path);
  ParameterDefinition p;
  p.name = r.string("name");
  p.min = r.number("min");
  p.max = r.number("max");
  const std::string scale = r.string("scale");
  if (scale == "linear") p.scale = Scale::linear;
  else if (scale == "log" || scale == "logarithmic") p.scale = Scale::logarithmic;
  else r.fail("scale", "must be 'linear' or 'log'");
  const std::string type = r.string("type");
  if (type == "integer") p.type = ValueType::integer;
  else if (type == "real") p.type = ValueType::real;
  else r.fail("type", "must be 'integer' or 'real'");
  p.unit = r.string("unit", "");
  p.default_value = r.optional_number("default");
  r.done();
  return p;
}

inline Json parameter_to_json(const ParameterDefinition& p) {
  Json j;
  j["name"] = p.name;
  j["min"] = p.min;
  j["max"] = p.max;
  j["scale"] = std::string(to_string(p.scale));
  j["type"] = std::string(to_string(p.type));
  j["unit"] = p.unit;
  if (p.default_value) j["default"] = *p.default_value;
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Campaign config

/// Parses a campaign config document. `space` names a parameter-spec file
/// (relative to `base_dir` unless absolute); alternatively `parameters`
/// embeds the definitions inline.
inline CampaignConfig parse_campaign_config(const Json& doc, const std::filesystem::path& base_dir = {}) {
  CampaignConfig cfg;
  detail::JsonReader root(doc, "");

  if (root.has("parameters")) {
    const Json& params = root.raw("parameters");
    if (!params.is_array()) root.fail("parameters", "expected an array");
    std::vector<ParameterDefinition> defs;
    for (std::size_t i = 0; i < params.size(); ++i) {
      defs.push_back(detail::parameter_from_json(params[i], "parameters[" + std::to_string(i) + "]"));
    }
    cfg.space = ParameterSpace(std::move(defs));
    cfg.space_path = root.string("space", "");
  } else {
    cfg.space_path = root.string("space");
    const std::filesystem::path p(cfg.space_path);
    cfg.space = load_space(p.is_absolute() || base_dir.empty() ? p : base_dir / p);
  }
  cfg.seed = root.unsigned_int("seed", cfg.seed);

  {
    auto ex = root.object("executor");
    const std::string type = ex.string("type");
    if (type == "synthetic") {
      cfg.executor.kind = ExecutorConfig::Kind::synthetic;
      auto syn = ex.object("synthetic");
      auto& s = cfg.executor.synthetic;
      s.base = syn.number("base");
      s.optimum = syn.numbers("optimum");
      s.widths = syn.numbers("widths");
      s.noise = syn.number("noise", 0.0);
      s.seed = syn.unsigned_int("seed", 0);
      s.latency_ms = syn.optional_number("latency_ms");
      syn.done();
      s.validate(cfg.space.dimension());
    } else if (type == "command") {
      cfg.executor.kind = ExecutorConfig::Kind::command;
      auto cmd = ex.object("command");
      auto& c = cfg.executor.command;
      c.command_template = cmd.string("template");
      c.workdir = cmd.string("workdir", "runs");
      c.timeout_s = cmd.optional_number("timeout_s");
      c.kill_grace_s = cmd.number("kill_grace_s", 2.0);
      cmd.done();
      if (c.command_template.find("{config}") == std::string::npos) {
        cmd.fail("template", "must reference the {config} placeholder");
      }
    } else {
      ex.fail("type", "must be 'synthetic' or 'command'");
    }
    ex.ignore("synthetic");
    ex.ignore("command");
    ex.done();
  }

  if (root.has("experiment")) {
    auto e = root.object("experiment");
    cfg.duration_s = e.number("duration_s", cfg.duration_s);
    cfg.warmup_s = e.number("warmup_s", cfg.warmup_s);
    cfg.cadence_s = e.number("cadence_s", cfg.cadence_s);
    e.done();
  }
  if (root.has("manifest")) {
    auto m = root.object("manifest");
    cfg.manifest.benchmark = m.string("benchmark", cfg.manifest.benchmark);
    cfg.manifest.namespace_name = m.string("namespace", "");
    cfg.manifest.api_version = m.string("api_version", cfg.manifest.api_version);
    m.done();
  }

  if (root.has("phases")) {
    auto ph = root.object("phases");
    if (ph.has("lhs")) {
      auto l = ph.object("lhs");
      cfg.lhs_samples = l.unsigned_int("samples", cfg.lhs_samples);
      cfg.lhs_restarts = l.unsigned_int("restarts", cfg.lhs_restarts);
      cfg.lhs_repetitions = l.unsigned_int("repetitions", cfg.lhs_repetitions);
      l.done();
    }
    if (ph.has("seed_selection")) {
      auto s = ph.object("seed_selection");
      cfg.seed_tolerance = s.number("tolerance", cfg.seed_tolerance);
      cfg.max_seeds = s.unsigned_int("max_seeds", cfg.max_seeds);
      s.done();
    }
    if (ph.has("annealing")) {
      auto a = ph.object("annealing");
      cfg.sa.iterations = a.unsigned_int("iterations", cfg.sa.iterations);
      cfg.sa.params_per_move = a.unsigned_int("params_per_move", cfg.sa.params_per_move);
      cfg.sa.step_range = a.number("step_range", cfg.sa.step_range);
      cfg.sa.schedule.cooling_rate = a.number("cooling_rate", cfg.sa.schedule.cooling_rate);
      cfg.sa_repetitions = a.unsigned_int("repetitions", cfg.sa_repetitions);
      if (a.has("initial_temperature")) {
        if (a.has("accepted_loss") || a.has("acceptance_probability")) {
          a.fail("initial_temperature", "give either initial_temperature or accepted_loss/acceptance_probability");
        }
        cfg.sa.schedule.initial_temperature = a.number("initial_temperature");
        cfg.sa_accepted_loss.reset();
        cfg.sa_acceptance_probability.reset();
      } else {
        cfg.sa_accepted_loss = a.number("accepted_loss", *cfg.sa_accepted_loss);
        cfg.sa_acceptance_probability = a.number("acceptance_probability", *cfg.sa_acceptance_probability);
        try {
          cfg.resolve_temperature();
        } catch (const ValidationError& e) {
          a.fail("accepted_loss", e.what());
        }
      }
      a.done();
    }
    if (ph.has("hill_climbing")) {
      auto h = ph.object("hill_climbing");
      cfg.hc.iterations = h.unsigned_int("iterations", cfg.hc.iterations);
      cfg.hc.params_per_move = h.unsigned_int("params_per_move", cfg.hc.params_per_move);
      cfg.hc.step_range = h.number("step_range", cfg.hc.step_range);
      cfg.hc_repetitions = h.unsigned_int("repetitions", cfg.hc_repetitions);
      cfg.hc.entry_gate = h.optional_number("entry_gate");
      h.done();
    }
    if (ph.has("validation")) {
      auto v = ph.object("validation");
      cfg.validation_repetitions = v.unsigned_int("repetitions", cfg.validation_repetitions);
      v.done();
    }
    ph.done();
  }

  if (root.has("early_stop")) {
    const Json& rules = root.raw("early_stop");
    if (!rules.is_array()) root.fail("early_stop", "expected an array of rules");
    cfg.stop_rules.clear();
    for (std::size_t i = 0; i < rules.size(); ++i) {
      detail::JsonReader r(rules[i], "early_stop[" + std::to_string(i) + "]");
      StopRule rule;
      rule.id = r.string("id");
      rule.fraction = r.number("fraction");
      rule.sustain_s = r.number("sustain_s");
      rule.during_warmup = r.boolean("during_warmup", true);
      r.done();
      rule.validate();
      cfg.stop_rules.push_back(std::move(rule));
    }
  }
  root.done();

  cfg.validate();
  return cfg;
}

inline CampaignConfig load_campaign_config(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  try {
    return parse_campaign_config(doc, path.parent_path());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

/// Self-contained form: the parameter definitions are embedded.
inline Json campaign_config_to_json(const CampaignConfig& cfg) {
  Json j;
  if (!cfg.space_path.empty()) j["space"] = cfg.space_path;
  Json params = Json::array();
  for (const auto& p : cfg.space.parameters()) params.push_back(detail::parameter_to_json(p));
  j["parameters"] = params;
  j["seed"] = cfg.seed;

  Json ex;
  if (cfg.executor.kind == ExecutorConfig::Kind::synthetic) {
    const auto& s = cfg.executor.synthetic;
    ex["type"] = "synthetic";
    Json syn;
    syn["base"] = s.base;
    syn["optimum"] = s.optimum;
    syn["widths"] = s.widths;
    syn["noise"] = s.noise;
    syn["seed"] = s.seed;
    if (s.latency_ms) syn["latency_ms"] = *s.latency_ms;
    ex["synthetic"] = syn;
  } else {
    const auto& c = cfg.executor.command;
    ex["type"] = "command";
    Json cmd;
    cmd["template"] = c.command_template;
    cmd["workdir"] = c.workdir.string();
    if (c.timeout_s) cmd["timeout_s"] = *c.timeout_s;
    cmd["kill_grace_s"] = c.kill_grace_s;
    ex["command"] = cmd;
  }
  j["executor"] = ex;
  j["experiment"] = {{"duration_s", cfg.duration_s}, {"warmup_s", cfg.warmup_s}, {"cadence_s", cfg.cadence_s}};
  Json manifest;
  manifest["benchmark"] = cfg.manifest.benchmark;
  if (!cfg.manifest.namespace_name.empty()) manifest["namespace"] = cfg.manifest.namespace_name;
  manifest["api_version"] = cfg.manifest.api_version;
  j["manifest"] = manifest;

  Json phases;
  phases["lhs"] = {{"samples", cfg.lhs_samples}, {"restarts", cfg.lhs_restarts}, {"repetitions", cfg.lhs_repetitions}};
  phases["seed_selection"] = {{"tolerance", cfg.seed_tolerance}, {"max_seeds", cfg.max_seeds}};
  Json sa;
  sa["iterations"] = cfg.sa.iterations;
  sa["params_per_move"] = cfg.sa.params_per_move;
  sa["step_range"] = cfg.sa.step_range;
  sa["cooling_rate"] = cfg.sa.schedule.cooling_rate;
  sa["repetitions"] = cfg.sa_repetitions;
  if (cfg.sa_accepted_loss && cfg.sa_acceptance_probability) {
    sa["accepted_loss"] = *cfg.sa_accepted_loss;
    sa["acceptance_probability"] = *cfg.sa_acceptance_probability;
  } else {
    sa["initial_temperature"] = cfg.sa.schedule.initial_temperature;
  }
  phases["annealing"] = sa;
  Json hc;
  hc["iterations"] = cfg.hc.iterations;
  hc["params_per_move"] = cfg.hc.params_per_move;
  hc["step_range"] = cfg.hc.step_range;
  hc["repetitions"] = cfg.hc_repetitions;
  if (cfg.hc.entry_gate) hc["entry_gate"] = *cfg.hc.entry_gate;
  phases["hill_climbing"] = hc;
  phases["validation"] = {{"repetitions", cfg.validation_repetitions}};
  j["phases"] = phases;

  Json rules = Json::array();
  for (const auto& r : cfg.stop_rules) {
    rules.push_back({{"id", r.id}, {"fraction", r.fraction}, {"sustain_s", r.sustain_s}, {"during_warmup", r.during_warmup}});
  }
  j["early_stop"] = rules;
  return j;
}

// ---------------------------------------------------------------------------
// Campaign state
//
// {"format": "cfgtune-state", "version": 1, "config": {...}, "phase": ...,
//  "cursor": <trials logged>, "complete": bool, "baseline": number|null,
//  "seeds": [x...], "seed_fallback": bool, "notes": [...],
//  "validation": {...}|null, "trials": [{...}, ...]}

inline Json trial_to_json(const Trial& t, bool timestamps = true) {
  Json j;
  j["id"] = t.id.render();
  j["phase"] = std::string(to_string(t.phase));
  j["normalized"] = t.normalized.coords;
  Json values;
  for (const auto& [name, value] : t.config.values) values[name] = value;
  j["config"] = values;
  j["repetitions"] = t.repetitions;
  j["status"] = std::string(to_string(t.status));
  j["detail"] = t.detail;
  j["objective"] = detail::number_or_null(t.objective);
  j["repetition_means"] = t.repetition_means;
  j["sample_count"] = t.sample_count;
  j["ended_at_s"] = t.ended_at_s ? Json(*t.ended_at_s) : Json(nullptr);
  if (t.latency) {
    j["latency"] = {{"count", t.latency->count}, {"mean", t.latency->mean}, {"p50", t.latency->p50},
                    {"p95", t.latency->p95}, {"max", t.latency->max}};
  } else {
    j["latency"] = nullptr;
  }
  j["warnings"] = t.warnings;
  j["accepted"] = t.accepted ? Json(*t.accepted) : Json(nullptr);
  j["temperature"] = t.temperature ? Json(*t.temperature) : Json(nullptr);
  if (timestamps) {
    j["started_at"] = t.started_at;
    j["finished_at"] = t.finished_at;
  }
  return j;
}

inline Trial trial_from_json(const Json& j, const ParameterSpace& space) {
  Trial t;
  auto id = TrialId::parse(j.at("id").get<std::string>());
  if (!id) throw StateCorruption("bad trial id '" + j.at("id").get<std::string>() + "'");
  t.id = *id;
  auto phase = parse_phase(j.at("phase").get<std::string>());
  if (!phase) throw StateCorruption("bad trial phase");
  t.phase = *phase;
  t.normalized.coords = j.at("normalized").get<std::vector<double>>();
  for (const auto& p : space.parameters()) t.config.values.emplace_back(p.name, j.at("config").at(p.name).get<double>());
  t.repetitions = j.at("repetitions").get<std::size_t>();
  const std::string status = j.at("status").get<std::string>();
  if (status == "completed") t.status = OutcomeStatus::completed;
  else if (status == "terminated_early") t.status = OutcomeStatus::terminated_early;
  else if (status == "failed") t.status = OutcomeStatus::failed;
  else throw StateCorruption("bad trial status '" + status + "'");
  t.detail = j.at("detail").get<std::string>();
  t.objective = detail::number_from(j.at("objective"));
  t.repetition_means = j.at("repetition_means").get<std::vector<double>>();
  t.sample_count = j.at("sample_count").get<std::size_t>();
  if (!j.at("ended_at_s").is_null()) t.ended_at_s = j.at("ended_at_s").get<double>();
  if (!j.at("latency").is_null()) {
    const Json& l = j.at("latency");
    t.latency = LatencySummary{l.at("count").get<std::size_t>(), l.at("mean").get<double>(), l.at("p50").get<double>(),
                               l.at("p95").get<double>(), l.at("max").get<double>()};
  }
  t.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (!j.at("accepted").is_null()) t.accepted = j.at("accepted").get<bool>();
  if (!j.at("temperature").is_null()) t.temperature = j.at("temperature").get<double>();
  if (j.contains("started_at")) t.started_at = j.at("started_at").get<std::string>();
  if (j.contains("finished_at")) t.finished_at = j.at("finished_at").get<std::string>();
  return t;
}

inline Json state_to_json(const CampaignState& s, bool timestamps = true) {
  Json j;
  j["format"] = "cfgtune-state";
  j["version"] = CampaignState::format_version;
  j["config"] = campaign_config_to_json(s.config);
  j["phase"] = std::string(to_string(s.phase));
  j["cursor"] = s.trials.size();
  j["complete"] = s.complete;
  j["baseline"] = s.baseline ? Json(*s.baseline) : Json(nullptr);
  j["seeds"] = s.seeds;
  j["seed_fallback"] = s.seed_fallback;
  j["notes"] = s.notes;
  if (s.validation) {
    const auto& v = *s.validation;
    j["validation"] = {{"start_id", v.start_id.render()},
                       {"best_id", v.best_id.render()},
                       {"start_runs", v.start_runs},
                       {"best_runs", v.best_runs},
                       {"start_mean", detail::number_or_null(v.start_mean)},
                       {"best_mean", detail::number_or_null(v.best_mean)},
                       {"relative_difference", detail::number_or_null(v.relative_difference)},
                       {"start_spread", detail::number_or_null(v.start_spread)},
                       {"best_spread", detail::number_or_null(v.best_spread)}};
  } else {
    j["validation"] = nullptr;
  }
  Json trials = Json::array();
  for (const auto& t : s.trials) trials.push_back(trial_to_json(t, timestamps));
  j["trials"] = trials;
  return j;
}

inline CampaignState state_from_json(const Json& j) {
  try {
    if (j.at("format") != "cfgtune-state") throw StateCorruption("not a campaign state file");
    if (j.at("version").get<int>() != CampaignState::format_version) {
      throw StateCorruption("unsupported state version " + j.at("version").dump());
    }
    CampaignState s;
    try {
      s.config = parse_campaign_config(j.at("config"));
    } catch (const ValidationError& e) {
      throw StateCorruption(std::string("embedded config invalid: ") + e.what());
    }
    auto phase = parse_phase(j.at("phase").get<std::string>());
    if (!phase) throw StateCorruption("bad phase");
    s.phase = *phase;
    s.complete = j.at("complete").get<bool>();
    if (!j.at("baseline").is_null()) s.baseline = j.at("baseline").get<double>();
    s.seeds = j.at("seeds").get<std::vector<std::size_t>>();
    s.seed_fallback = j.at("seed_fallback").get<bool>();
    s.notes = j.at("notes").get<std::vector<std::string>>();
    if (!j.at("validation").is_null()) {
      const Json& v = j.at("validation");
      ValidationReport r;
      r.start_id = TrialId::parse(v.at("start_id").get<std::string>()).value();
      r.best_id = TrialId::parse(v.at("best_id").get<std::string>()).value();
      r.start_runs = v.at("start_runs").get<std::vector<double>>();
      r.best_runs = v.at("best_runs").get<std::vector<double>>();
      r.start_mean = detail::number_from(v.at("start_mean"));
      r.best_mean = detail::number_from(v.at("best_mean"));
      r.relative_difference = detail::number_from(v.at("relative_difference"));
      r.start_spread = detail::number_from(v.at("start_spread"));
      r.best_spread = detail::number_from(v.at("best_spread"));
      s.validation = r;
    }
    for (const auto& t : j.at("trials")) s.trials.push_back(trial_from_json(t, s.config.space));
    if (j.at("cursor").get<std::size_t>() != s.trials.size()) throw StateCorruption("cursor does not match trial count");
    return s;
  } catch (const Json::exception& e) {
    throw StateCorruption(std::string("malformed state: ") + e.what());
  } catch (const std::bad_optional_access&) {
    throw StateCorruption("malformed state: bad trial id");
  }
}

inline void save_state(const CampaignState& s, const std::filesystem::path& path) {
  write_file_atomic(path, state_to_json(s).dump(1) + "\n");
}

inline CampaignState load_state(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const ValidationError& e) {
    throw StateCorruption(e.what());
  }
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw StateCorruption(path.string() + ": " + e.what());
  }
  try {
    return state_from_json(doc);
  } catch (const StateCorruption& e) {
    throw StateCorruption(path.string() + ": " + e.what());
  }
}

/// Persist hook writing the state file after every change.
inline std::function<void(const CampaignState&)> persist_to(std::filesystem::path path) {
  return [path = std::move(path)](const CampaignState& s) { save_state(s, path); };
}

}  // namespace cfgtune
