#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfgtune/campaign.hpp"
#include "cfgtune/errors.hpp"
#include "cfgtune/param_space.hpp"

namespace cfgtune {

// ---------------------------------------------------------------------------
// Correlation

/// 1-based ranks; tied values share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractViolation("pearson: length mismatch");
  const auto n = static_cast<double>(a.size());
  if (a.size() < 2) return std::nullopt;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// Spearman rank correlation; nullopt when either column is constant.
inline std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson(ra, rb);
}

struct StrengthThresholds {
  double very_strong = 0.8;
  double strong = 0.6;
  double moderate = 0.4;
  double weak = 0.2;
};

inline std::string strength_label(std::optional<double> r, const StrengthThresholds& t = {}) {
  if (!r) return "undefined";
  const double a = std::fabs(*r);
  if (a >= t.very_strong) return "very strong";
  if (a >= t.strong) return "strong";
  if (a >= t.moderate) return "moderate";
  if (a >= t.weak) return "weak";
  return "negligible";
}

struct ParameterCorrelation {
  std::string name;
  std::optional<double> coefficient;
  std::string strength;
};

struct CorrelationReport {
  std::vector<ParameterCorrelation> parameters;
  std::size_t sample_count = 0;
};

/// Rank correlation between each normalized coordinate and the objective,
/// over completed trials only.
inline CorrelationReport correlate(const std::vector<Trial>& trials, const ParameterSpace& space,
                                   const StrengthThresholds& thresholds = {}) {
  std::vector<const Trial*> used;
  for (const auto& t : trials) {
    if (t.completed() && std::isfinite(t.objective)) used.push_back(&t);
  }
  if (used.size() < 3) throw ValidationError("correlation needs at least 3 completed trials");
  std::vector<double> objective;
  for (const Trial* t : used) objective.push_back(t->objective);

  CorrelationReport report;
  report.sample_count = used.size();
  for (std::size_t j = 0; j < space.dimension(); ++j) {
    std::vector<double> column;
    for (const Trial* t : used) column.push_back(t->normalized[j]);
    const auto r = spearman(column, objective);
    report.parameters.push_back({space[j].name, r, strength_label(r, thresholds)});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Improvement table

struct ImprovementRow {
  TrialId id;
  Phase phase = Phase::baseline;
  OutcomeStatus status = OutcomeStatus::completed;
  ConcreteConfig config;
  double objective = NAN;
  std::optional<TrialId> ancestor;
  /// (objective - ancestor) / ancestor
  std::optional<double> delta_previous;
  std::optional<double> delta_baseline;

  friend bool operator==(const ImprovementRow& a, const ImprovementRow& b) {
    const bool same_objective = (std::isnan(a.objective) && std::isnan(b.objective)) || a.objective == b.objective;
    return a.id == b.id && a.phase == b.phase && a.status == b.status && a.config == b.config && same_objective &&
           a.ancestor == b.ancestor && a.delta_previous == b.delta_previous && a.delta_baseline == b.delta_baseline;
  }
};

struct ImprovementTable {
  std::vector<std::string> parameter_names;
  std::vector<ImprovementRow> rows;

  friend bool operator==(const ImprovementTable&, const ImprovementTable&) = default;
};

inline std::optional<double> relative_delta(double value, double reference) {
  if (!std::isfinite(value) || !std::isfinite(reference) || reference == 0.0) return std::nullopt;
  return (value - reference) / reference;
}

/// The configuration a trial was derived from in the previous phase.
inline std::optional<TrialId> ancestor_of(const TrialId& id) {
  if (id.is_default) return std::nullopt;
  if (!id.y) return TrialId::baseline();
  if (!id.z) return TrialId::sample(*id.x);
  if (*id.y == 0) return TrialId::sample(*id.x);
  return TrialId::annealed(*id.x, *id.y);
}

namespace detail {

inline std::optional<Phase> ancestor_phase(const TrialId& ancestor) {
  if (ancestor.is_default) return Phase::baseline;
  if (!ancestor.y) return Phase::lhs;
  return Phase::annealing;
}

}  // namespace detail

/// One row per trial, grouped by phase (baseline, lhs, annealing,
/// hill_climbing, validation) and sorted by objective within each group.
/// Deltas are only given for completed trials with a completed reference.
inline ImprovementTable improvement_table(const CampaignState& state) {
  ImprovementTable table;
  for (const auto& p : state.config.space.parameters()) table.parameter_names.push_back(p.name);
  const Trial* baseline = state.find(TrialId::baseline(), Phase::baseline);

  for (Phase phase : {Phase::baseline, Phase::lhs, Phase::annealing, Phase::hill_climbing, Phase::validation}) {
    std::vector<ImprovementRow> block;
    for (const auto& t : state.trials) {
      if (t.phase != phase) continue;
      ImprovementRow row;
      row.id = t.id;
      row.phase = t.phase;
      row.status = t.status;
      row.config = t.config;
      row.objective = t.objective;
      if (phase != Phase::validation) row.ancestor = ancestor_of(t.id);
      if (t.completed()) {
        if (row.ancestor) {
          const Trial* a = state.find(*row.ancestor, *detail::ancestor_phase(*row.ancestor));
          if (a && a->completed()) row.delta_previous = relative_delta(t.objective, a->objective);
        }
        if (baseline && baseline->completed()) row.delta_baseline = relative_delta(t.objective, baseline->objective);
      }
      block.push_back(std::move(row));
    }
    std::stable_sort(block.begin(), block.end(), [](const ImprovementRow& a, const ImprovementRow& b) {
      const bool an = std::isnan(a.objective), bn = std::isnan(b.objective);
      if (an != bn) return bn;
      return a.objective > b.objective;
    });
    table.rows.insert(table.rows.end(), block.begin(), block.end());
  }
  if (table.rows.empty()) throw ValidationError("campaign has no trials yet");
  return table;
}

// ---------------------------------------------------------------------------
// CSV (trials.csv)
//
// Header: id,phase,status,objective,ancestor,delta_previous,delta_baseline,<parameter names...>
// Numbers use the shortest round-trip form; missing values are empty.

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field.push_back(c);
      any = true;
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string optional_number_text(std::optional<double> v) { return v ? format_number(*v) : ""; }

}  // namespace detail

inline std::string improvement_table_csv(const ImprovementTable& table) {
  std::string out = "id,phase,status,objective,ancestor,delta_previous,delta_baseline";
  for (const auto& name : table.parameter_names) out += "," + detail::csv_field(name);
  out += "\n";
  for (const auto& r : table.rows) {
    out += detail::csv_field(r.id.render());
    out += "," + std::string(to_string(r.phase));
    out += "," + std::string(to_string(r.status));
    out += "," + (std::isfinite(r.objective) ? format_number(r.objective) : std::string());
    out += "," + (r.ancestor ? detail::csv_field(r.ancestor->render()) : std::string());
    out += "," + detail::optional_number_text(r.delta_previous);
    out += "," + detail::optional_number_text(r.delta_baseline);
    for (const auto& [name, value] : r.config.values) out += "," + format_number(value);
    out += "\n";
  }
  return out;
}

inline ImprovementTable parse_improvement_csv(std::string_view text) {
  const auto rows = detail::parse_csv(text);
  if (rows.empty()) throw ValidationError("trials CSV is empty");
  const auto& header = rows.front();
  constexpr std::size_t fixed = 7;
  if (header.size() < fixed || header[0] != "id" || header[6] != "delta_baseline") {
    throw ValidationError("trials CSV has an unexpected header");
  }
  ImprovementTable table;
  table.parameter_names.assign(header.begin() + fixed, header.end());
  auto number = [](const std::string& s, std::size_t line) {
    auto v = parse_number(s);
    if (!v) throw ValidationError("trials CSV line " + std::to_string(line) + ": bad number '" + s + "'");
    return *v;
  };
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const std::size_t line = i + 1;
    if (f.size() != header.size()) throw ValidationError("trials CSV line " + std::to_string(line) + ": wrong field count");
    ImprovementRow r;
    auto id = TrialId::parse(f[0]);
    auto phase = parse_phase(f[1]);
    if (!id || !phase) throw ValidationError("trials CSV line " + std::to_string(line) + ": bad id or phase");
    r.id = *id;
    r.phase = *phase;
    if (f[2] == "completed") r.status = OutcomeStatus::completed;
    else if (f[2] == "terminated_early") r.status = OutcomeStatus::terminated_early;
    else if (f[2] == "failed") r.status = OutcomeStatus::failed;
    else throw ValidationError("trials CSV line " + std::to_string(line) + ": bad status");
    r.objective = f[3].empty() ? NAN : number(f[3], line);
    if (!f[4].empty()) r.ancestor = TrialId::parse(f[4]);
    if (!f[5].empty()) r.delta_previous = number(f[5], line);
    if (!f[6].empty()) r.delta_baseline = number(f[6], line);
    for (std::size_t k = fixed; k < f.size(); ++k) r.config.values.emplace_back(header[k], number(f[k], line));
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace cfgtune
