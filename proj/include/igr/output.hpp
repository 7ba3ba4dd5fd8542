#pragma once

// Snapshot CSV files and simple SVG line plots.
//
// CSV layout: "# key=value" metadata lines, a column header
// "x[,y],rho,u[,v]", then one row per cell with 17 significant digits so
// that values survive a text round trip bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "igr/errors.hpp"
#include "igr/grid.hpp"

namespace igr {

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest text for a double that parses back to the same value.
inline std::string format_number(double v) {
  char buf[32];
  for (int digits = 1; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

inline std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

inline void write_snapshot_csv(std::ostream& os, const State& s, const Metadata& meta) {
  const Grid& g = s.grid();
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
  os << (g.dim == 2 ? "x,y,rho,u,v\n" : "x,rho,u\n");
  char buf[40];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << sep;
  };
  const VectorField u = velocity(s);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    put(g.center(g.i_of(c)), ',');
    if (g.dim == 2) put(g.center(g.j_of(c)), ',');
    put(s.rho(c), ',');
    put(u(c, 0), g.dim == 2 ? ',' : '\n');
    if (g.dim == 2) put(u(c, 1), '\n');
  }
}

inline void emit_csv(const State& s, const Metadata& meta, const std::filesystem::path& path) {
  std::ofstream os = open_for_writing(path);
  write_snapshot_csv(os, s, meta);
  if (!os) throw IoError("write failed for " + path.string());
}

struct CsvTable {
  Metadata metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Value of a metadata key, or an empty string.
  std::string meta(const std::string& key) const {
    for (const auto& [k, v] : metadata) {
      if (k == key) return v;
    }
    return {};
  }
};

inline CsvTable parse_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::size_t start = 1;
      while (start < eq && line[start] == ' ') ++start;
      table.metadata.emplace_back(line.substr(start, eq - start), line.substr(eq + 1));
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (table.columns.empty()) {
      while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw IoError("malformed number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != table.columns.size()) throw IoError("row width differs from header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline CsvTable parse_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return parse_csv(is);
}

/// Table with a free-form header, used for summaries and trajectories.
inline void emit_table(const std::filesystem::path& path, const Metadata& meta,
                       const std::vector<std::string>& columns,
                       const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os = open_for_writing(path);
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << '\n';
  }
  if (!os) throw IoError("write failed for " + path.string());
}

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label;
  int width = 640;
  int height = 400;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

inline std::string fixed(double v, int digits = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

/// Polyline plot. Non-finite samples break the line. Output depends only on
/// the input, so identical data gives identical bytes.
inline std::string render_svg(const std::vector<Series>& series, const PlotOptions& opt = {}) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0;
  if (!(y0 <= y1)) y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 60, right = 20, top = 30, bottom = 40;
  const double pw = opt.width - left - right, ph = opt.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
     << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    os << "<text x=\"" << detail::fixed(px(xv)) << "\" y=\"" << detail::fixed(top + ph + 15)
       << "\" font-size=\"10\" text-anchor=\"middle\">" << format_number(std::round(xv * 1e4) / 1e4) << "</text>\n";
    os << "<text x=\"" << detail::fixed(left - 5) << "\" y=\"" << detail::fixed(py(yv) + 3)
       << "\" font-size=\"10\" text-anchor=\"end\">" << format_number(std::round(yv * 1e4) / 1e4) << "</text>\n";
  }
  if (!opt.title.empty()) {
    os << "<text x=\"" << detail::fixed(left + pw / 2) << "\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">"
       << detail::xml_escape(opt.title) << "</text>\n";
  }
  os << "<text x=\"" << detail::fixed(left + pw / 2) << "\" y=\"" << detail::fixed(opt.height - 6.0)
     << "\" font-size=\"11\" text-anchor=\"middle\">" << detail::xml_escape(opt.x_label) << "</text>\n";
  if (!opt.y_label.empty()) {
    os << "<text x=\"14\" y=\"" << detail::fixed(top + ph / 2) << "\" font-size=\"11\" text-anchor=\"middle\""
       << " transform=\"rotate(-90 14 " << detail::fixed(top + ph / 2) << ")\">" << detail::xml_escape(opt.y_label)
       << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % (sizeof palette / sizeof *palette)];
    const auto& ser = series[s];
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
           << "\"/>\n";
      }
      points.clear();
    };
    for (std::size_t k = 0; k < std::min(ser.x.size(), ser.y.size()); ++k) {
      if (!std::isfinite(ser.x[k]) || !std::isfinite(ser.y[k])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += detail::fixed(px(ser.x[k])) + ',' + detail::fixed(py(ser.y[k]));
    }
    flush();
    const double ly = top + 14.0 + 14.0 * s;
    os << "<line x1=\"" << detail::fixed(left + pw - 110) << "\" y1=\"" << detail::fixed(ly - 4) << "\" x2=\""
       << detail::fixed(left + pw - 90) << "\" y2=\"" << detail::fixed(ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << detail::fixed(left + pw - 85) << "\" y=\"" << detail::fixed(ly)
       << "\" font-size=\"10\">" << detail::xml_escape(ser.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void emit_svg(const std::vector<Series>& series, const std::filesystem::path& path,
                     const PlotOptions& opt = {}) {
  std::ofstream os = open_for_writing(path);
  os << render_svg(series, opt);
  if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace igr
