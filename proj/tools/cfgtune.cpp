#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "cfgtune/cfgtune.hpp"

namespace fs = std::filesystem;
using namespace cfgtune;

namespace {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_runtime = 3, exit_state = 4 };

struct Globals {
  std::string config;
  std::string state = "campaign-state.json";
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

std::string one_decimal(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

void print_summary(const CampaignState& state, const std::string& state_path) {
  std::cout << (state.complete ? "campaign complete" : "campaign in progress") << ": " << state.trials.size()
            << " trials, state in " << state_path << "\n";
  if (state.baseline) std::cout << "baseline c_default: " << one_decimal(*state.baseline) << " records/s\n";
  if (const Trial* best = state.best()) {
    std::cout << "best " << best->id.render() << ": " << one_decimal(best->objective) << " records/s";
    if (state.baseline) {
      if (const auto d = relative_delta(best->objective, *state.baseline)) {
        std::cout << " (" << (*d >= 0 ? "+" : "") << one_decimal(*d * 100.0) << "% vs. baseline)";
      }
    }
    std::cout << "\n";
  }
  if (state.validation && std::isfinite(state.validation->relative_difference)) {
    std::cout << "validation: " << state.validation->best_id.render() << " vs " << state.validation->start_id.render()
              << " " << one_decimal(state.validation->relative_difference * 100.0) << "%\n";
  }
}

RunOptions campaign_options(const Globals& g) {
  RunOptions opts;
  opts.persist = persist_to(g.state);
  if (g.verbose) {
    opts.on_trial = [](const Trial& t) {
      std::cerr << "[" << to_string(t.phase) << "] " << t.id.render() << " " << to_string(t.status);
      if (std::isfinite(t.objective)) std::cerr << " " << one_decimal(t.objective) << " records/s";
      if (!t.detail.empty()) std::cerr << " (" << t.detail << ")";
      std::cerr << "\n";
      for (const auto& w : t.warnings) std::cerr << "  warning: " << w << "\n";
    };
  }
  return opts;
}

CampaignConfig require_config(const Globals& g) {
  if (g.config.empty()) throw ValidationError("no campaign config given (use --config or CFGTUNE_CONFIG)");
  CampaignConfig cfg = load_campaign_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

int cmd_init(const std::string& dir, bool force) {
  const fs::path config = fs::path(dir) / "campaign.json";
  const fs::path space = fs::path(dir) / "kafka-streams.space";
  for (const auto& p : {config, space}) {
    if (fs::exists(p) && !force) throw ValidationError("'" + p.string() + "' already exists; pass --force to overwrite");
  }
  write_file_atomic(space, std::string(bundled::kafka_streams_space));
  write_file_atomic(config, std::string(bundled::demo_campaign));
  std::cout << "wrote " << config.string() << "\nwrote " << space.string() << "\n";
  return exit_ok;
}

int cmd_run(const Globals& g, std::optional<std::size_t> stop_after, bool force) {
  const CampaignConfig cfg = require_config(g);
  if (fs::exists(g.state) && !force) {
    throw ValidationError("state file '" + g.state + "' already exists; use 'resume' or pass --force to start over");
  }
  StateLock lock(g.state);
  RunOptions opts = campaign_options(g);
  opts.stop_after_trials = stop_after;
  try {
    print_summary(run_campaign(cfg, opts), g.state);
  } catch (const CampaignInterrupted& e) {
    std::cerr << "cfgtune: " << e.what() << "; continue with 'cfgtune resume --state " << g.state << "'\n";
  }
  return exit_ok;
}

int cmd_resume(const Globals& g, std::optional<std::size_t> stop_after) {
  if (!g.config.empty()) std::cerr << "cfgtune: note: resume uses the configuration stored in " << g.state << "\n";
  StateLock lock(g.state);
  const CampaignState previous = load_state(g.state);
  if (g.seed && *g.seed != previous.config.seed) {
    throw ValidationError("--seed " + std::to_string(*g.seed) + " differs from the campaign's seed " +
                          std::to_string(previous.config.seed));
  }
  if (previous.complete) {
    std::cout << "nothing to resume\n";
    print_summary(previous, g.state);
    return exit_ok;
  }
  RunOptions opts = campaign_options(g);
  opts.stop_after_trials = stop_after;
  try {
    print_summary(resume_campaign(previous, opts), g.state);
  } catch (const CampaignInterrupted& e) {
    std::cerr << "cfgtune: " << e.what() << "\n";
  }
  return exit_ok;
}

unsigned parse_formats(const std::vector<std::string>& names) {
  unsigned formats = 0;
  for (const auto& n : names) {
    if (n == "markdown" || n == "md") formats |= markdown;
    else if (n == "csv") formats |= csv;
    else if (n == "jsonl") formats |= jsonl;
    else if (n == "svg") formats |= svg_figures;
    else if (n == "all") formats |= all_formats;
    else throw ValidationError("--format: unknown format '" + n + "' (markdown, csv, jsonl, svg, all)");
  }
  return formats ? formats : all_formats;
}

int cmd_report(const Globals& g, const std::string& out, const std::vector<std::string>& format_names) {
  const unsigned formats = parse_formats(format_names);
  const CampaignState state = load_state(g.state);
  for (const auto& p : emit_report(state, out, formats)) std::cout << p.string() << "\n";
  return exit_ok;
}

int cmd_validate(const Globals& g, std::optional<std::size_t> repetitions) {
  StateLock lock(g.state);
  CampaignState state = load_state(g.state);
  const std::size_t reps = repetitions.value_or(state.config.validation_repetitions ? state.config.validation_repetitions : 3);
  auto executor = make_executor(state.config);
  RunOptions opts = campaign_options(g);
  const ValidationReport report = validate_best(state, reps, *executor, opts);
  save_state(state, g.state);
  std::cout << report.start_id.render() << " (start): mean " << one_decimal(report.start_mean) << " records/s over "
            << report.start_runs.size() << " runs\n"
            << report.best_id.render() << " (best): mean " << one_decimal(report.best_mean) << " records/s over "
            << report.best_runs.size() << " runs\n"
            << "relative difference: "
            << (std::isfinite(report.relative_difference) ? one_decimal(report.relative_difference * 100.0) + "%" : "n/a")
            << "\n";
  return exit_ok;
}

int cmd_render_manifest(const Globals& g, const std::string& trial, const std::string& out) {
  const auto id = TrialId::parse(trial);
  if (!id) throw ValidationError("--trial: '" + trial + "' is not a trial identifier");
  ExperimentRequest request;
  ManifestSettings settings;
  request.id = id->render();
  if (id->is_default) {
    CampaignConfig cfg;
    if (!g.config.empty()) {
      cfg = require_config(g);
    } else {
      cfg.space = parse_space(bundled::kafka_streams_space, "kafka-streams.space");
    }
    request.config = cfg.space.default_config();
    request.duration_s = cfg.duration_s;
    request.warmup_s = cfg.warmup_s;
    request.cadence_s = cfg.cadence_s;
    request.repetitions = cfg.lhs_repetitions;
    settings = cfg.manifest;
  } else {
    const CampaignState state = load_state(g.state);
    const Trial* found = nullptr;
    for (const auto& t : state.trials) {
      if (t.id == *id) {
        found = &t;
        break;
      }
    }
    if (!found) throw ValidationError("--trial: " + trial + " is not in " + g.state);
    request.config = found->config;
    request.duration_s = state.config.duration_s;
    request.warmup_s = state.config.warmup_s;
    request.cadence_s = state.config.cadence_s;
    request.repetitions = found->repetitions;
    settings = state.config.manifest;
  }
  const std::string doc = render_execution_manifest(request, settings);
  if (out.empty() || out == "-") {
    std::cout << doc;
  } else {
    write_file_atomic(out, doc);
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment-driven configuration tuning: LHS, simulated annealing and hill climbing."};
  app.set_version_flag("--version", "cfgtune 0.1.0");
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config, "Campaign config (JSON)")->envname("CFGTUNE_CONFIG");
  app.add_option("--state", g.state, "Campaign state file")->capture_default_str();
  app.add_option("--seed", g.seed, "Master RNG seed, overriding the config")->envname("CFGTUNE_SEED");
  app.add_flag("-v,--verbose", g.verbose, "Log every trial to stderr");

  std::string init_dir = ".";
  bool init_force = false;
  auto* init = app.add_subcommand("init", "Write a demo campaign config and the bundled Kafka Streams space");
  init->add_option("dir", init_dir, "Target directory")->capture_default_str();
  init->add_flag("--force", init_force, "Overwrite existing files");

  std::optional<std::size_t> stop_after;
  bool run_force = false;
  auto* run = app.add_subcommand("run", "Start a campaign from --config, writing --state");
  run->add_option("--stop-after", stop_after, "Stop once the log holds this many trials");
  run->add_flag("--force", run_force, "Replace an existing state file");

  auto* resume = app.add_subcommand("resume", "Continue an interrupted campaign from --state");
  resume->add_option("--stop-after", stop_after, "Stop once the log holds this many trials");

  std::string report_dir = "report";
  std::vector<std::string> formats;
  auto* report = app.add_subcommand("report", "Write report.md, trials.csv, trials.jsonl and figures/");
  report->add_option("-o,--out", report_dir, "Output directory")->capture_default_str();
  report->add_option("--format", formats, "markdown, csv, jsonl, svg or all (repeatable)")->delimiter(',');

  std::optional<std::size_t> validation_reps;
  auto* validate = app.add_subcommand("validate", "Re-measure the best configuration against its starting point");
  validate->add_option("--repetitions", validation_reps, "Runs per configuration")->check(CLI::PositiveNumber);

  std::string manifest_trial = "c_default", manifest_out;
  auto* manifest = app.add_subcommand("render-manifest", "Print the execution manifest for one configuration");
  manifest->add_option("--trial", manifest_trial, "Trial identifier, e.g. c_{19,17,16}")->capture_default_str();
  manifest->add_option("-o,--out", manifest_out, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (*init) return cmd_init(init_dir, init_force);
    if (*run) return cmd_run(g, stop_after, run_force);
    if (*resume) return cmd_resume(g, stop_after);
    if (*report) return cmd_report(g, report_dir, formats);
    if (*validate) return cmd_validate(g, validation_reps);
    if (*manifest) return cmd_render_manifest(g, manifest_trial, manifest_out);
  } catch (const ValidationError& e) {
    std::cerr << "cfgtune: error: " << e.what() << "\n";
    return exit_config;
  } catch (const StateCorruption& e) {
    std::cerr << "cfgtune: state error: " << e.what() << "\n";
    return exit_state;
  } catch (const std::exception& e) {
    std::cerr << "cfgtune: runtime error: " << e.what() << "\n";
    return exit_runtime;
  }
  return exit_ok;
}
