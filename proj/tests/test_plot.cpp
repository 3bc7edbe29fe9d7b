#include <filesystem>
#include <fstream>
#include <sstream>

#include "chaosgan/error.hpp"
#include "chaosgan/plot.hpp"
#include "doctest.h"

using namespace chaosgan;

namespace {

CsvTable table_of(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

}  // namespace

TEST_CASE("plot kinds") {
  CHECK(parse_plot_kind("line") == PlotKind::Line);
  CHECK(parse_plot_kind("scatter") == PlotKind::Scatter);
  CHECK_THROWS_AS(parse_plot_kind("bar"), ConfigError);
}

TEST_CASE("empty or non-numeric tables are rejected") {
  const CsvTable header_only = table_of("x,y\n");
  CHECK_THROWS_AS(render_svg(header_only, {}), ConfigError);
  const CsvTable words = table_of("x,y\na,b\n");
  CHECK_THROWS_AS(render_svg(words, {}), ConfigError);
}

TEST_CASE("three-point line plot") {
  const CsvTable t = table_of("stride,proximity\n0,0\n1,0.5\n2,1\n");
  PlotOptions o;
  o.title = "sweep";
  const std::string svg = render_svg(t, o);
  CHECK(svg == render_svg(t, o));
  CHECK(svg.find("points=\"70,335.455 345,190 620,44.5455\"") != std::string::npos);
  CHECK(svg.find(">stride</text>") != std::string::npos);
  CHECK(svg.find(">proximity</text>") != std::string::npos);
  CHECK(svg.find(">sweep</text>") != std::string::npos);
}

TEST_CASE("column selection, scatter and skipped cells") {
  const CsvTable t = table_of("source,a,b,note\nx,1,2,ok\ny,2,,ok\nmean,1.5,2,\n");
  PlotOptions o;
  o.kind = PlotKind::Scatter;
  o.x_column = "a";
  const auto series = extract_series(t, o);
  REQUIRE(series.size() == 1);
  CHECK(series[0].name == "b");
  CHECK(series[0].x == std::vector<double>{1, 1.5});
  const std::string svg = render_svg(t, o);
  std::size_t circles = 0;
  for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) {
    ++circles;
  }
  CHECK(circles == 2);
  CHECK(svg.find("<polyline") == std::string::npos);
  o.y_columns = {"missing"};
  CHECK_THROWS_AS(extract_series(t, o), ConfigError);
}

TEST_CASE("plot files") {
  const auto dir = std::filesystem::temp_directory_path() / "chaosgan_plot_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "d.csv");
    f << "# chaosgan 0.1.0 config_hash=0000000000000000\nx,y,z\n1,2,3\n2,3,1\n";
  }
  PlotOptions o;
  o.width = 100;
  o.height = 80;
  plot_csv(dir / "d.csv", dir / "d", o);
  std::ifstream svg(dir / "d.svg");
  std::stringstream s;
  s << svg.rdbuf();
  CHECK(s.str().find(">y, z</text>") != std::string::npos);
  CHECK(std::filesystem::file_size(dir / "d.pgm") == std::string("P5\n100 80\n255\n").size() + 8000);
  const auto raster = render_raster(read_csv(dir / "d.csv"), o);
  CHECK(raster.size() == 8000);
  bool inked = false;
  for (auto v : raster) inked = inked || v < 255;
  CHECK(inked);
  std::filesystem::remove_all(dir);
}
