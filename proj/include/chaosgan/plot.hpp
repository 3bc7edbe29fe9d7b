#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "chaosgan/csv.hpp"

namespace chaosgan {

enum class PlotKind { Line, Scatter };

struct PlotOptions {
  PlotKind kind = PlotKind::Line;
  std::string title;
  std::string x_column;                // empty: first column
  std::vector<std::string> y_columns;  // empty: every other column with numeric data
  std::size_t width = 640;
  std::size_t height = 400;
};

PlotKind parse_plot_kind(const std::string& name);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Rows whose x or y cell is not a finite number are skipped. Throws ConfigError if nothing is left.
std::vector<PlotSeries> extract_series(const CsvTable& table, const PlotOptions& options);

/// Self-contained SVG; axis labels come from the CSV header.
std::string render_svg(const CsvTable& table, const PlotOptions& options);

/// 8-bit grayscale raster of the same plot, row-major, white background.
std::vector<unsigned char> render_raster(const CsvTable& table, const PlotOptions& options);

/// Writes `<stem>.svg` and `<stem>.pgm`.
void plot_csv(const std::filesystem::path& csv_path, const std::filesystem::path& stem,
              const PlotOptions& options);
void plot_table(const CsvTable& table, const std::filesystem::path& stem,
                const PlotOptions& options);

}  // namespace chaosgan
