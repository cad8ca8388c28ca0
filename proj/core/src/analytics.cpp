#include "therasim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "therasim/error.hpp"
#include "therasim/persona.hpp"

namespace therasim::analytics {

std::string_view trend_direction_name(TrendDirection direction) {
  switch (direction) {
    case TrendDirection::decreasing: return "decreasing";
    case TrendDirection::increasing: return "increasing";
    case TrendDirection::flat: return "flat";
  }
  return "";
}

SeverityIndex build_severity_index(const std::vector<selfplay::Transcript>& transcripts) {
  SeverityIndex index;
  for (const auto& t : transcripts) index[t.session_id] = t.severity_rank;
  return index;
}

DistributionTable approach_distribution(const std::vector<analyst::Annotation>& annotations,
                                        const SeverityIndex& index, Grouping grouping) {
  if (annotations.empty()) {
    throw Error(Errc::empty_input, "no annotations to aggregate");
  }

  // group rank -> label -> count; rank is the severity rank, or 0 under
  // Grouping::none where everything lands in "all".
  std::map<int, std::map<std::string, std::int64_t>> counts;
  std::map<int, std::int64_t> totals;
  for (const auto& a : annotations) {
    int rank = 0;
    if (grouping == Grouping::severity) {
      auto it = index.find(a.session_id);
      if (it == index.end()) {
        throw Error(Errc::dangling_session,
                    "annotation '" + a.session_id + "' has no stored transcript");
      }
      rank = it->second;
    }
    ++counts[rank][a.approach];
    ++totals[rank];
  }

  DistributionTable table;
  table.grouping = grouping;
  for (const auto& [rank, label_counts] : counts) {
    const std::string group =
        grouping == Grouping::severity
            ? std::string(persona::severity_name(persona::severity_from_rank(rank)))
            : std::string("all");
    const double total = static_cast<double>(totals.at(rank));
    for (const auto& approach : analyst::approach_taxonomy()) {
      auto it = label_counts.find(approach.canonical_name);
      const std::int64_t count = it == label_counts.end() ? 0 : it->second;
      table.rows.push_back({group, approach.canonical_name, count, count / total});
    }
    std::sort(table.rows.end() - static_cast<long>(analyst::approach_taxonomy().size()),
              table.rows.end(),
              [](const DistributionRow& a, const DistributionRow& b) { return a.label < b.label; });
  }
  return table;
}

FrequencyTable technique_frequency(const std::vector<analyst::Annotation>& annotations,
                                   analyst::Mode mode) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& a : annotations) {
    if (a.mode != mode) {
      throw Error(Errc::mode_mismatch,
                  "annotation '" + a.session_id + "' has mode '" +
                      std::string(analyst::mode_name(a.mode)) + "', expected '" +
                      std::string(analyst::mode_name(mode)) + "'");
    }
    // Techniques are already deduplicated per annotation, so each one
    // counts at most once per session.
    for (const auto& technique : a.techniques) ++counts[technique];
  }

  FrequencyTable table;
  table.mode = mode;
  const double total = static_cast<double>(annotations.size());
  for (const auto& technique : analyst::technique_taxonomy()) {
    auto it = counts.find(technique.canonical_name);
    const std::int64_t count = it == counts.end() ? 0 : it->second;
    table.rows.push_back(
        {technique.canonical_name, count, total == 0.0 ? 0.0 : count / total});
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const FrequencyRow& a, const FrequencyRow& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.label < b.label;
            });
  return table;
}

namespace {

// Average ranks (1-based) with tie handling.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

TrendStat monotonic_trend(const DistributionTable& table, const std::string& label,
                          double flat_threshold) {
  if (table.grouping != Grouping::severity) {
    throw Error(Errc::missing_groups, "trend requires a severity-grouped table");
  }
  std::map<int, double> by_rank;
  for (const auto& row : table.rows) {
    if (row.label != label) continue;
    auto level = persona::severity_from_name(row.group);
    if (level) by_rank[persona::severity_rank(*level)] = row.proportion;
  }
  if (by_rank.size() != static_cast<std::size_t>(persona::kSeverityLevels)) {
    throw Error(Errc::missing_groups,
                "trend for '" + label + "' needs all " +
                    std::to_string(persona::kSeverityLevels) + " severity groups, have " +
                    std::to_string(by_rank.size()));
  }

  std::vector<double> severity;
  std::vector<double> proportion;
  for (const auto& [rank, p] : by_rank) {
    severity.push_back(static_cast<double>(rank));
    proportion.push_back(p);
  }

  TrendStat stat;
  stat.label = label;
  stat.n_groups = static_cast<int>(by_rank.size());

  const std::vector<double> rx = average_ranks(severity);
  const std::vector<double> ry = average_ranks(proportion);
  const double n = static_cast<double>(rx.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mean_x += rx[i];
    mean_y += ry[i];
  }
  mean_x /= n;
  mean_y /= n;
  double cov = 0.0, var_x = 0.0, var_y = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean_x;
    const double dy = ry[i] - mean_y;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }

  if (var_x == 0.0 || var_y == 0.0) {
    stat.rho = 0.0;
    stat.direction = TrendDirection::flat;
    return stat;
  }
  stat.rho = cov / std::sqrt(var_x * var_y);
  if (std::fabs(stat.rho) < flat_threshold) {
    stat.direction = TrendDirection::flat;
  } else {
    stat.direction = stat.rho < 0.0 ? TrendDirection::decreasing : TrendDirection::increasing;
  }
  return stat;
}

}  // namespace therasim::analytics
