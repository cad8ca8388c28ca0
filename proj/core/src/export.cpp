#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "therasim/analytics.hpp"
#include "therasim/error.hpp"

namespace therasim::analytics {

namespace {

// Shortest round-trip representation; locale-independent.
std::string number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string fixed2(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 2);
  return std::string(buf, end);
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string xml_escape(const std::string& value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed 12-color palette, indexed by position in the approach taxonomy.
constexpr const char* kPalette[] = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
};

std::string approach_color(const std::string& label) {
  const auto& taxonomy = analyst::approach_taxonomy();
  constexpr std::size_t palette_size = sizeof(kPalette) / sizeof(kPalette[0]);
  for (std::size_t i = 0; i < taxonomy.size(); ++i) {
    if (taxonomy[i].canonical_name == label) return kPalette[i % palette_size];
  }
  return kPalette[0];
}

struct SvgBuilder {
  std::ostringstream out;

  void open(double width, double height) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(width)
        << "\" height=\"" << fixed2(height) << "\" viewBox=\"0 0 " << fixed2(width) << " "
        << fixed2(height) << "\" font-family=\"sans-serif\">\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill) {
    out << "  <rect x=\"" << fixed2(x) << "\" y=\"" << fixed2(y) << "\" width=\"" << fixed2(w)
        << "\" height=\"" << fixed2(h) << "\" fill=\"" << fill << "\"/>\n";
  }
  void line(double x1, double y1, double x2, double y2) {
    out << "  <line x1=\"" << fixed2(x1) << "\" y1=\"" << fixed2(y1) << "\" x2=\"" << fixed2(x2)
        << "\" y2=\"" << fixed2(y2) << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  }
  void text(double x, double y, const std::string& s, int size, const std::string& anchor) {
    out << "  <text x=\"" << fixed2(x) << "\" y=\"" << fixed2(y) << "\" font-size=\"" << size
        << "\" text-anchor=\"" << anchor << "\">" << xml_escape(s) << "</text>\n";
  }
  std::string close() {
    out << "</svg>\n";
    return out.str();
  }
};

}  // namespace

std::string distribution_csv(const DistributionTable& table) {
  std::string csv = "group,label,count,proportion\n";
  for (const auto& row : table.rows) {
    csv += csv_field(row.group) + "," + csv_field(row.label) + "," +
           std::to_string(row.count) + "," + number(row.proportion) + "\n";
  }
  return csv;
}

std::string frequency_csv(const FrequencyTable& table) {
  std::string csv = "label,count,share\n";
  for (const auto& row : table.rows) {
    csv += csv_field(row.label) + "," + std::to_string(row.count) + "," + number(row.share) + "\n";
  }
  return csv;
}

std::string distribution_chart_svg(const DistributionTable& table, const std::string& title) {
  // Groups in first-appearance order (already rank-ordered); only labels
  // with a nonzero count somewhere get bars and a legend entry.
  std::vector<std::string> groups;
  std::vector<std::string> labels;
  for (const auto& row : table.rows) {
    if (std::find(groups.begin(), groups.end(), row.group) == groups.end()) {
      groups.push_back(row.group);
    }
  }
  const auto& taxonomy = analyst::approach_taxonomy();
  for (const auto& approach : taxonomy) {
    for (const auto& row : table.rows) {
      if (row.label == approach.canonical_name && row.count > 0) {
        labels.push_back(approach.canonical_name);
        break;
      }
    }
  }

  double max_value = 0.0;
  auto value_of = [&](const std::string& group, const std::string& label) {
    for (const auto& row : table.rows) {
      if (row.group == group && row.label == label) return row.proportion;
    }
    return 0.0;
  };
  for (const auto& g : groups) {
    for (const auto& l : labels) max_value = std::max(max_value, value_of(g, l));
  }
  if (max_value <= 0.0) max_value = 1.0;

  const double bar_w = 14.0;
  const double group_gap = 28.0;
  const double group_w = std::max(bar_w, bar_w * static_cast<double>(labels.size()));
  const double margin_left = 56.0;
  const double margin_top = 40.0;
  const double plot_h = 240.0;
  const double legend_h = 18.0 * static_cast<double>(labels.size());
  const double width =
      margin_left + static_cast<double>(groups.size()) * (group_w + group_gap) + 180.0;
  const double height = std::max(margin_top + plot_h + 60.0, margin_top + legend_h + 40.0);

  SvgBuilder svg;
  svg.open(width, height);
  svg.text(margin_left, 20.0, title, 14, "start");
  const double axis_y = margin_top + plot_h;
  svg.line(margin_left, margin_top, margin_left, axis_y);
  svg.line(margin_left, axis_y, width - 170.0, axis_y);
  svg.text(margin_left - 6.0, margin_top + 4.0, number(max_value), 10, "end");
  svg.text(margin_left - 6.0, axis_y + 4.0, "0", 10, "end");

  double x = margin_left + group_gap / 2.0;
  for (const auto& group : groups) {
    double bx = x;
    for (const auto& label : labels) {
      const double v = value_of(group, label);
      const double h = plot_h * (v / max_value);
      if (h > 0.0) svg.rect(bx, axis_y - h, bar_w - 2.0, h, approach_color(label));
      bx += bar_w;
    }
    svg.text(x + group_w / 2.0, axis_y + 16.0, group, 11, "middle");
    x += group_w + group_gap;
  }

  double ly = margin_top;
  const double legend_x = width - 160.0;
  for (const auto& label : labels) {
    svg.rect(legend_x, ly, 12.0, 12.0, approach_color(label));
    svg.text(legend_x + 18.0, ly + 10.0, label, 11, "start");
    ly += 18.0;
  }
  return svg.close();
}

std::string frequency_chart_svg(const FrequencyTable& table, const std::string& title) {
  std::vector<const FrequencyRow*> rows;
  for (const auto& row : table.rows) {
    if (row.count > 0) rows.push_back(&row);
  }
  std::int64_t max_count = 1;
  for (const auto* row : rows) max_count = std::max(max_count, row->count);

  const double row_h = 20.0;
  const double margin_left = 260.0;
  const double margin_top = 40.0;
  const double plot_w = 360.0;
  const double height = margin_top + row_h * static_cast<double>(std::max<std::size_t>(rows.size(), 1)) + 20.0;

  SvgBuilder svg;
  svg.open(margin_left + plot_w + 60.0, height);
  svg.text(10.0, 20.0, title, 14, "start");
  double y = margin_top;
  for (const auto* row : rows) {
    const double w = plot_w * (static_cast<double>(row->count) / static_cast<double>(max_count));
    svg.text(margin_left - 8.0, y + 13.0, row->label, 11, "end");
    svg.rect(margin_left, y + 3.0, w, row_h - 6.0, "#4e79a7");
    svg.text(margin_left + w + 6.0, y + 13.0, std::to_string(row->count), 11, "start");
    y += row_h;
  }
  if (rows.empty()) {
    svg.text(margin_left, y + 13.0, "(no data)", 11, "start");
  }
  return svg.close();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> export_tables(
    const std::vector<NamedDistribution>& distributions,
    const std::vector<NamedFrequency>& frequencies, const std::filesystem::path& output_dir) {
  std::vector<std::filesystem::path> files;
  if (distributions.empty() && frequencies.empty()) return files;

  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + output_dir.string());

  for (const auto& [name, table] : distributions) {
    const auto csv_path = output_dir / (name + ".csv");
    const auto svg_path = output_dir / (name + ".svg");
    write_file(csv_path, distribution_csv(table));
    write_file(svg_path, distribution_chart_svg(table, name));
    files.push_back(csv_path);
    files.push_back(svg_path);
  }
  for (const auto& [name, table] : frequencies) {
    const auto csv_path = output_dir / (name + ".csv");
    const auto svg_path = output_dir / (name + ".svg");
    write_file(csv_path, frequency_csv(table));
    write_file(svg_path, frequency_chart_svg(table, name));
    files.push_back(csv_path);
    files.push_back(svg_path);
  }
  return files;
}

}  // namespace therasim::analytics
