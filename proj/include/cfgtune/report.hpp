#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cfgtune/analysis.hpp"
#include "cfgtune/campaign.hpp"
#include "cfgtune/campaign_io.hpp"

namespace cfgtune {

namespace svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Frame {
  double width = 640, height = 360, left = 70, right = 20, top = 40, bottom = 50;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

inline std::string open(const Frame& f, std::string_view title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(f.width) + "\" height=\"" +
                  num(f.height) + "\" viewBox=\"0 0 " + num(f.width) + " " + num(f.height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(f.width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
       escape(title) + "</text>\n";
  s += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top + f.plot_h()) + "\" x2=\"" + num(f.left + f.plot_w()) +
       "\" y2=\"" + num(f.top + f.plot_h()) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.left) + "\" y2=\"" +
       num(f.top + f.plot_h()) + "\" stroke=\"black\"/>\n";
  return s;
}

inline std::string axis_labels(const Frame& f, double lo, double hi, std::string_view x_label) {
  std::string s;
  s += "<text x=\"" + num(f.left - 6) + "\" y=\"" + num(f.top + 4) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + num(hi) + "</text>\n";
  s += "<text x=\"" + num(f.left - 6) + "\" y=\"" + num(f.top + f.plot_h() + 4) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + num(lo) + "</text>\n";
  s += "<text x=\"" + num(f.left + f.plot_w() / 2) + "\" y=\"" + num(f.height - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + escape(x_label) + "</text>\n";
  return s;
}

inline std::pair<double, double> range_of(const std::vector<double>& ys, bool include_zero) {
  double lo = include_zero ? 0.0 : INFINITY, hi = include_zero ? 0.0 : -INFINITY;
  for (double y : ys) {
    if (!std::isfinite(y)) continue;
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi == lo) hi = lo + 1.0;
  return {lo, hi};
}

/// One circle per point (non-finite values drawn on the x axis) joined by a polyline.
inline std::string line_chart(std::string_view title, const std::vector<double>& ys, std::string_view x_label,
                              const std::vector<std::string>& point_classes = {}) {
  Frame f;
  auto [lo, hi] = range_of(ys, false);
  const double pad = (hi - lo) * 0.05;
  lo -= pad;
  hi += pad;
  auto x_at = [&](std::size_t i) {
    return f.left + (ys.size() <= 1 ? f.plot_w() / 2 : f.plot_w() * static_cast<double>(i) / static_cast<double>(ys.size() - 1));
  };
  auto y_at = [&](double y) {
    const double v = std::isfinite(y) ? y : lo;
    return f.top + f.plot_h() * (1.0 - (v - lo) / (hi - lo));
  };
  std::string s = open(f, title) + axis_labels(f, lo, hi, x_label);
  s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < ys.size(); ++i) s += (i ? " " : "") + num(x_at(i)) + "," + num(y_at(ys[i]));
  s += "\"/>\n";
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const std::string cls = i < point_classes.size() ? point_classes[i] : "point";
    s += "<circle class=\"" + cls + "\" cx=\"" + num(x_at(i)) + "\" cy=\"" + num(y_at(ys[i])) + "\" r=\"3\" fill=\"" +
         (cls == "accepted" ? "steelblue" : cls == "point" ? "steelblue" : "white") + "\" stroke=\"steelblue\"/>\n";
  }
  return s + "</svg>\n";
}

inline std::string bar_chart(std::string_view title, const std::vector<std::string>& labels,
                             const std::vector<double>& values) {
  Frame f;
  f.bottom = 110;
  f.height = 420;
  auto [lo, hi] = range_of(values, true);
  auto y_at = [&](double y) { return f.top + f.plot_h() * (1.0 - (y - lo) / (hi - lo)); };
  const double slot = f.plot_w() / static_cast<double>(std::max<std::size_t>(values.size(), 1));
  std::string s = open(f, title) + axis_labels(f, lo, hi, "");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::isfinite(values[i]) ? values[i] : 0.0;
    const double y0 = y_at(0.0), y1 = y_at(v);
    const double x = f.left + slot * static_cast<double>(i) + slot * 0.15;
    s += "<rect class=\"bar\" x=\"" + num(x) + "\" y=\"" + num(std::min(y0, y1)) + "\" width=\"" + num(slot * 0.7) +
         "\" height=\"" + num(std::fabs(y1 - y0)) + "\" fill=\"" + (v < 0 ? "indianred" : "steelblue") + "\"/>\n";
    const double cx = x + slot * 0.35, cy = f.top + f.plot_h() + 8;
    s += "<text x=\"" + num(cx) + "\" y=\"" + num(cy) + "\" transform=\"rotate(40 " + num(cx) + " " + num(cy) +
         ")\" font-family=\"sans-serif\" font-size=\"9\">" + escape(labels[i]) + "</text>\n";
  }
  return s + "</svg>\n";
}

inline std::string scatter(std::string_view title, const std::vector<double>& xs, const std::vector<double>& ys,
                           std::string_view x_label) {
  Frame f;
  auto [xlo, xhi] = range_of(xs, false);
  auto [ylo, yhi] = range_of(ys, false);
  std::string s = open(f, title) + axis_labels(f, ylo, yhi, x_label);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cx = f.left + f.plot_w() * (xs[i] - xlo) / (xhi - xlo);
    const double cy = f.top + f.plot_h() * (1.0 - (ys[i] - ylo) / (yhi - ylo));
    s += "<circle class=\"point\" cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  return s + "</svg>\n";
}

}  // namespace svg

enum ReportFormat : unsigned { markdown = 1u, csv = 2u, jsonl = 4u, svg_figures = 8u, all_formats = 15u };

namespace detail {

inline std::string fixed1(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

inline std::string percent(std::optional<double> v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f%%", *v * 100.0);
  return buf;
}

inline std::string fig_name(const TrialId& id) { return dns_label(id.render()); }

/// Per-seed step series for one search phase, keyed by the trace's starting point.
inline std::vector<std::pair<std::string, std::vector<const Trial*>>> traces(const CampaignState& state, Phase phase) {
  std::vector<std::pair<std::string, std::vector<const Trial*>>> out;
  for (const auto& t : state.trials) {
    if (t.phase != phase) continue;
    const std::string key = phase == Phase::annealing ? TrialId::sample(*t.id.x).render()
                                                      : (*t.id.y == 0 ? TrialId::sample(*t.id.x)
                                                                      : TrialId::annealed(*t.id.x, *t.id.y)).render();
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == key; });
    if (it == out.end()) {
      out.emplace_back(key, std::vector<const Trial*>{});
      it = std::prev(out.end());
    }
    it->second.push_back(&t);
  }
  return out;
}

inline std::string trace_csv(const std::vector<const Trial*>& steps) {
  std::string s = "step,id,status,objective,accepted\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Trial& t = *steps[i];
    s += std::to_string(i + 1) + "," + csv_field(t.id.render()) + "," + std::string(to_string(t.status)) + "," +
         (std::isfinite(t.objective) ? format_number(t.objective) : "") + "," +
         (t.accepted ? (*t.accepted ? "true" : "false") : "") + "\n";
  }
  return s;
}

}  // namespace detail

/// Markdown summary of the campaign: headline numbers, the improvement
/// table, the correlation table and the validation comparison.
inline std::string render_markdown_report(const CampaignState& state) {
  const ImprovementTable table = improvement_table(state);
  const auto& space = state.config.space;
  std::string md = "# Configuration tuning report\n\n";

  std::size_t terminated = 0, failed = 0;
  for (const auto& t : state.trials) {
    terminated += t.status == OutcomeStatus::terminated_early;
    failed += t.status == OutcomeStatus::failed;
  }
  md += "- Status: " + std::string(state.complete ? "complete" : "in progress (" + std::string(to_string(state.phase)) + ")") + "\n";
  md += "- Baseline (c_default): " + (state.baseline ? detail::fixed1(*state.baseline) + " records/s" : "not measured") + "\n";
  if (const Trial* best = state.best()) {
    md += "- Best: " + best->id.render() + " at " + detail::fixed1(best->objective) + " records/s";
    if (state.baseline) md += " (" + detail::percent(relative_delta(best->objective, *state.baseline)) + " vs. baseline)";
    md += "\n";
  }
  md += "- Trials: " + std::to_string(state.trials.size()) + " (baseline " + std::to_string(state.count(Phase::baseline)) +
        ", lhs " + std::to_string(state.count(Phase::lhs)) + ", annealing " + std::to_string(state.count(Phase::annealing)) +
        ", hill climbing " + std::to_string(state.count(Phase::hill_climbing)) + ", validation " +
        std::to_string(state.count(Phase::validation)) + ")\n";
  md += "- Terminated early: " + std::to_string(terminated) + ", failed: " + std::to_string(failed) + "\n";
  if (!state.seeds.empty()) {
    md += "- Annealing seeds:";
    for (std::size_t x : state.seeds) md += " " + TrialId::sample(x).render();
    md += state.seed_fallback ? " (fallback: none reached the tolerance)\n" : "\n";
  }
  if (!state.notes.empty()) {
    md += "\n## Notes\n\n";
    for (const auto& n : state.notes) md += "- " + n + "\n";
  }

  md += "\n## Configurations\n\n| Identifier | Phase |";
  for (const auto& p : space.parameters()) md += " " + p.name + " |";
  md += " Throughput (records/s) | +/- previous phase | +/- baseline | Status |\n|---|---|";
  for (std::size_t i = 0; i < space.dimension(); ++i) md += "---:|";
  md += "---:|---:|---:|---|\n";
  for (const auto& r : table.rows) {
    md += "| " + r.id.render() + " | " + std::string(to_string(r.phase)) + " |";
    for (std::size_t i = 0; i < space.dimension(); ++i) md += " " + format_quantity(r.config.values[i].second, space[i].unit) + " |";
    md += " " + detail::fixed1(r.objective) + " | " + detail::percent(r.delta_previous) + " | " +
          detail::percent(r.delta_baseline) + " | " + std::string(to_string(r.status)) + " |\n";
  }

  std::vector<Trial> lhs;
  for (const auto& t : state.trials) {
    if (t.phase == Phase::lhs && t.completed()) lhs.push_back(t);
  }
  md += "\n## Parameter correlation with throughput (LHS phase)\n\n";
  if (lhs.size() >= 3) {
    const auto corr = correlate(lhs, space);
    md += "Spearman rank correlation over " + std::to_string(corr.sample_count) + " completed samples.\n\n";
    md += "| Parameter | r | Strength |\n|---|---:|---|\n";
    for (const auto& c : corr.parameters) {
      char buf[32];
      if (c.coefficient) std::snprintf(buf, sizeof buf, "%+.3f", *c.coefficient);
      md += "| " + c.name + " | " + (c.coefficient ? std::string(buf) : std::string("n/a")) + " | " + c.strength + " |\n";
    }
  } else {
    md += "Fewer than 3 completed samples; correlation not computed.\n";
  }

  if (state.validation) {
    const auto& v = *state.validation;
    md += "\n## Validation\n\n";
    md += "| Configuration | Runs | Mean (records/s) | Spread |\n|---|---:|---:|---:|\n";
    md += "| " + v.start_id.render() + " (start) | " + std::to_string(v.start_runs.size()) + " | " +
          detail::fixed1(v.start_mean) + " | " + detail::percent(std::isfinite(v.start_spread) ? std::optional(v.start_spread) : std::nullopt) + " |\n";
    md += "| " + v.best_id.render() + " (best) | " + std::to_string(v.best_runs.size()) + " | " +
          detail::fixed1(v.best_mean) + " | " + detail::percent(std::isfinite(v.best_spread) ? std::optional(v.best_spread) : std::nullopt) + " |\n";
    md += "\nRelative difference: " +
          (std::isfinite(v.relative_difference) ? detail::percent(v.relative_difference) : std::string("n/a")) + "\n";
  }
  return md;
}

inline std::string render_trials_jsonl(const CampaignState& state) {
  const ImprovementTable table = improvement_table(state);
  std::string out;
  for (const auto& r : table.rows) {
    Json j;
    j["id"] = r.id.render();
    j["phase"] = std::string(to_string(r.phase));
    j["status"] = std::string(to_string(r.status));
    j["objective"] = detail::number_or_null(r.objective);
    j["ancestor"] = r.ancestor ? Json(r.ancestor->render()) : Json(nullptr);
    j["delta_previous"] = r.delta_previous ? Json(*r.delta_previous) : Json(nullptr);
    j["delta_baseline"] = r.delta_baseline ? Json(*r.delta_baseline) : Json(nullptr);
    Json values;
    for (const auto& [name, value] : r.config.values) values[name] = value;
    j["config"] = values;
    out += j.dump() + "\n";
  }
  return out;
}

/// Writes report.md, trials.csv, trials.jsonl and figures/ under `dir`.
/// Returns the written paths in a stable order.
inline std::vector<std::filesystem::path> emit_report(const CampaignState& state, const std::filesystem::path& dir,
                                                      unsigned formats = all_formats) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  auto put = [&](const fs::path& p, const std::string& content) {
    write_file_atomic(p, content);
    written.push_back(p);
  };
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeFailure("cannot create report directory '" + dir.string() + "': " + ec.message());

  if (formats & markdown) put(dir / "report.md", render_markdown_report(state));
  if (formats & csv) put(dir / "trials.csv", improvement_table_csv(improvement_table(state)));
  if (formats & jsonl) put(dir / "trials.jsonl", render_trials_jsonl(state));
  if (formats & svg_figures) {
    const fs::path fig = dir / "figures";
    for (Phase phase : {Phase::annealing, Phase::hill_climbing}) {
      for (const auto& [start, steps] : detail::traces(state, phase)) {
        std::vector<double> ys;
        std::vector<std::string> classes;
        for (const Trial* t : steps) {
          ys.push_back(t->status == OutcomeStatus::failed ? NAN : t->objective);
          classes.push_back(t->status != OutcomeStatus::completed ? "not-completed"
                                                                  : (t->accepted.value_or(false) ? "accepted" : "rejected"));
        }
        const std::string stem = std::string(phase == Phase::annealing ? "annealing_" : "hill_climbing_") +
                                 detail::fig_name(*TrialId::parse(start));
        const std::string title = std::string(phase == Phase::annealing ? "Annealing from " : "Hill climbing from ") + start;
        put(fig / (stem + ".svg"), svg::line_chart(title, ys, "iteration", classes));
        put(fig / (stem + ".csv"), detail::trace_csv(steps));
      }
    }
    std::vector<std::string> labels;
    std::vector<double> values;
    if (state.baseline) {
      labels.push_back("c_default");
      values.push_back(*state.baseline);
    }
    for (Phase phase : {Phase::lhs, Phase::annealing, Phase::hill_climbing}) {
      const Trial* best = nullptr;
      for (const auto& t : state.trials) {
        if (t.phase == phase && t.completed() && (!best || t.objective > best->objective)) best = &t;
      }
      if (best) {
        labels.push_back(std::string(to_string(phase)) + " " + best->id.render());
        values.push_back(best->objective);
      }
    }
    put(fig / "phase_best.svg", svg::bar_chart("Best throughput per phase (records/s)", labels, values));

    std::vector<Trial> lhs;
    for (const auto& t : state.trials) {
      if (t.phase == Phase::lhs && t.completed()) lhs.push_back(t);
    }
    if (lhs.size() >= 3) {
      const auto corr = correlate(lhs, state.config.space);
      std::vector<std::string> names;
      std::vector<double> rs;
      for (const auto& c : corr.parameters) {
        names.push_back(c.name);
        rs.push_back(c.coefficient.value_or(0.0));
      }
      put(fig / "correlation.svg", svg::bar_chart("Spearman correlation with throughput", names, rs));
    }

    std::vector<double> thr, lat;
    std::string scatter_csv = "id,phase,throughput,latency_mean_ms,latency_p95_ms\n";
    for (const auto& t : state.trials) {
      if (!t.completed() || !t.latency) continue;
      thr.push_back(t.objective);
      lat.push_back(t.latency->mean);
      scatter_csv += detail::csv_field(t.id.render()) + "," + std::string(to_string(t.phase)) + "," +
                     format_number(t.objective) + "," + format_number(t.latency->mean) + "," +
                     format_number(t.latency->p95) + "\n";
    }
    if (!thr.empty()) {
      put(fig / "latency_vs_throughput.svg", svg::scatter("Mean latency (ms) vs. throughput", thr, lat, "throughput (records/s)"));
      put(fig / "latency_vs_throughput.csv", scatter_csv);
    }
  }
  return written;
}

}  // namespace cfgtune
