#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "therasim/analyst.hpp"
#include "therasim/selfplay.hpp"

namespace therasim::analytics {

enum class Grouping { severity, none };

struct DistributionRow {
  std::string group;   // severity level name, or "all"
  std::string label;   // approach canonical name
  std::int64_t count = 0;
  double proportion = 0.0;

  bool operator==(const DistributionRow&) const = default;
};

// Per-group approach counts and proportions. Every group lists all twelve
// approaches (absent ones with count 0) and its proportions sum to 1.
struct DistributionTable {
  Grouping grouping = Grouping::none;
  std::vector<DistributionRow> rows;  // ordered by group rank, then label
};

struct FrequencyRow {
  std::string label;  // technique canonical name
  std::int64_t count = 0;
  double share = 0.0;  // share of annotated sessions using the technique

  bool operator==(const FrequencyRow&) const = default;
};

struct FrequencyTable {
  analyst::Mode mode = analyst::Mode::single;
  std::vector<FrequencyRow> rows;  // ordered by count desc, then label
};

enum class TrendDirection { decreasing, increasing, flat };

std::string_view trend_direction_name(TrendDirection direction);

// Spearman rank correlation between severity rank and per-group proportion.
struct TrendStat {
  std::string label;
  double rho = 0.0;
  TrendDirection direction = TrendDirection::flat;
  int n_groups = 0;
};

// session_id -> severity rank, resolved from stored transcripts.
using SeverityIndex = std::map<std::string, int>;

SeverityIndex build_severity_index(const std::vector<selfplay::Transcript>& transcripts);

// Exact counting of approaches per group. Throws EMPTY_INPUT on an empty
// annotation set and DANGLING_SESSION when an annotation has no transcript.
DistributionTable approach_distribution(const std::vector<analyst::Annotation>& annotations,
                                        const SeverityIndex& index, Grouping grouping);

// Exact technique counts; in multi mode a technique counts at most once per
// session. Throws MODE_MISMATCH when an annotation has the wrong mode.
FrequencyTable technique_frequency(const std::vector<analyst::Annotation>& annotations,
                                   analyst::Mode mode);

// Trend of one approach's proportion across the five severity ranks, with
// average-rank tie handling. |rho| below flat_threshold reports flat; a
// zero-variance proportion vector reports rho = 0, flat. Requires all five
// groups (MISSING_GROUPS otherwise).
TrendStat monotonic_trend(const DistributionTable& table, const std::string& label,
                          double flat_threshold = 0.3);

struct NamedDistribution {
  std::string name;  // file stem
  DistributionTable table;
};

struct NamedFrequency {
  std::string name;
  FrequencyTable table;
};

// Writes one CSV and one SVG bar chart per table under output_dir; byte
// deterministic for identical inputs. Headers are exactly
// "group,label,count,proportion" and "label,count,share".
std::vector<std::filesystem::path> export_tables(
    const std::vector<NamedDistribution>& distributions,
    const std::vector<NamedFrequency>& frequencies, const std::filesystem::path& output_dir);

std::string distribution_csv(const DistributionTable& table);
std::string frequency_csv(const FrequencyTable& table);
std::string distribution_chart_svg(const DistributionTable& table, const std::string& title);
std::string frequency_chart_svg(const FrequencyTable& table, const std::string& title);

}  // namespace therasim::analytics
