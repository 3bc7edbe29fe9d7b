#include "chaosgan/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "chaosgan/error.hpp"

namespace chaosgan {

namespace {

constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 50.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

bool parse_cell(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double w, h;

  double px(double x) const { return kMarginLeft + (x - x0) / (x1 - x0) * (w - kMarginLeft - kMarginRight); }
  double py(double y) const { return h - kMarginBottom - (y - y0) / (y1 - y0) * (h - kMarginTop - kMarginBottom); }
};

Frame make_frame(const std::vector<PlotSeries>& series, const PlotOptions& o) {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) {
      x0 = std::min(x0, v);
      x1 = std::max(x1, v);
    }
    for (double v : s.y) {
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (x1 == x0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  return {x0, x1, y0 - pad, y1 + pad, static_cast<double>(o.width), static_cast<double>(o.height)};
}

std::string y_label(const std::vector<PlotSeries>& series) {
  std::string out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i > 0) out += ", ";
    out += series[i].name;
  }
  return out;
}

}  // namespace

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "line") return PlotKind::Line;
  if (name == "scatter") return PlotKind::Scatter;
  throw ConfigError("plot: unknown kind '" + name + "' (expected line or scatter)");
}

std::vector<PlotSeries> extract_series(const CsvTable& table, const PlotOptions& options) {
  if (table.header.empty() || table.rows.empty()) throw ConfigError("plot: csv has no data rows");
  const std::size_t xc = options.x_column.empty() ? 0 : table.column(options.x_column);
  std::vector<std::size_t> ycols;
  if (options.y_columns.empty()) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c == xc) continue;
      double v = 0.0;
      const bool numeric = std::any_of(table.rows.begin(), table.rows.end(),
                                       [&](const auto& r) { return parse_cell(r[c], v); });
      if (numeric) ycols.push_back(c);
    }
  } else {
    for (const auto& name : options.y_columns) ycols.push_back(table.column(name));
  }

  std::vector<PlotSeries> out;
  for (std::size_t c : ycols) {
    PlotSeries s{table.header[c], {}, {}};
    for (const auto& row : table.rows) {
      double x = 0.0;
      double y = 0.0;
      if (parse_cell(row[xc], x) && parse_cell(row[c], y)) {
        s.x.push_back(x);
        s.y.push_back(y);
      }
    }
    if (!s.x.empty()) out.push_back(std::move(s));
  }
  if (out.empty()) throw ConfigError("plot: no numeric data to plot");
  return out;
}

std::string render_svg(const CsvTable& table, const PlotOptions& options) {
  const auto series = extract_series(table, options);
  const Frame f = make_frame(series, options);
  const std::string x_name = table.header[options.x_column.empty() ? 0 : table.column(options.x_column)];

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << num(f.w / 2) << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(options.title) << "</text>\n";
  }
  const double left = kMarginLeft;
  const double right = f.w - kMarginRight;
  const double top = kMarginTop;
  const double bottom = f.h - kMarginBottom;
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left)
      << "\" height=\"" << num(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    svg << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(bottom + 16)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << num(xv) << "</text>\n";
    svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(f.py(yv) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << num(yv) << "</text>\n";
  }
  svg << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(f.h - 10)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(x_name) << "</text>\n";
  svg << "<text x=\"14\" y=\"" << num((top + bottom) / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
      << num((top + bottom) / 2) << ")\">" << escape(y_label(series)) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    const auto& ser = series[s];
    if (options.kind == PlotKind::Line) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < ser.x.size(); ++i) {
        if (i > 0) svg << ' ';
        svg << num(f.px(ser.x[i])) << ',' << num(f.py(ser.y[i]));
      }
      svg << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < ser.x.size(); ++i) {
        svg << "<circle cx=\"" << num(f.px(ser.x[i])) << "\" cy=\"" << num(f.py(ser.y[i]))
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    svg << "<text x=\"" << num(right - 4) << "\" y=\"" << num(top + 14 + 14.0 * static_cast<double>(s))
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << escape(ser.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<unsigned char> render_raster(const CsvTable& table, const PlotOptions& options) {
  const auto series = extract_series(table, options);
  const Frame f = make_frame(series, options);
  const auto w = static_cast<long>(options.width);
  const auto h = static_cast<long>(options.height);
  std::vector<unsigned char> px(static_cast<std::size_t>(w * h), 255);
  auto put = [&](long x, long y, unsigned char v) {
    if (x >= 0 && x < w && y >= 0 && y < h) px[static_cast<std::size_t>(y * w + x)] = v;
  };
  auto line = [&](double xa, double ya, double xb, double yb, unsigned char v) {
    const long steps = std::max(1L, static_cast<long>(std::ceil(std::max(std::abs(xb - xa), std::abs(yb - ya)))));
    for (long i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(steps);
      put(std::lround(xa + t * (xb - xa)), std::lround(ya + t * (yb - ya)), v);
    }
  };
  const double left = kMarginLeft;
  const double right = f.w - kMarginRight;
  const double top = kMarginTop;
  const double bottom = f.h - kMarginBottom;
  line(left, top, right, top, 0);
  line(right, top, right, bottom, 0);
  line(right, bottom, left, bottom, 0);
  line(left, bottom, left, top, 0);

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto shade = static_cast<unsigned char>(std::min<std::size_t>(160, 40 * s));
    const auto& ser = series[s];
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      const double x = f.px(ser.x[i]);
      const double y = f.py(ser.y[i]);
      if (options.kind == PlotKind::Line && i > 0) {
        line(f.px(ser.x[i - 1]), f.py(ser.y[i - 1]), x, y, shade);
      } else if (options.kind == PlotKind::Scatter) {
        for (long dy = -2; dy <= 2; ++dy) {
          for (long dx = -2; dx <= 2; ++dx) put(std::lround(x) + dx, std::lround(y) + dy, shade);
        }
      }
    }
  }
  return px;
}

void plot_table(const CsvTable& table, const std::filesystem::path& stem,
                const PlotOptions& options) {
  const std::string svg = render_svg(table, options);
  const auto raster = render_raster(table, options);
  std::filesystem::path svg_path = stem;
  svg_path += ".svg";
  std::filesystem::path pgm_path = stem;
  pgm_path += ".pgm";
  std::ofstream s(svg_path, std::ios::binary);
  if (!s) throw Error(svg_path.string() + ": cannot open for writing");
  s << svg;
  std::ofstream p(pgm_path, std::ios::binary);
  if (!p) throw Error(pgm_path.string() + ": cannot open for writing");
  p << "P5\n" << options.width << ' ' << options.height << "\n255\n";
  p.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
}

void plot_csv(const std::filesystem::path& csv_path, const std::filesystem::path& stem,
              const PlotOptions& options) {
  plot_table(read_csv(csv_path), stem, options);
}

}  // namespace chaosgan
