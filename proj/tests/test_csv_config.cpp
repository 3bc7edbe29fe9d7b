#include <cmath>
#include <limits>
#include <sstream>

#include "chaosgan/config_file.hpp"
#include "chaosgan/csv.hpp"
#include "chaosgan/error.hpp"
#include "chaosgan/experiment.hpp"
#include "doctest.h"

using namespace chaosgan;

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, -0.5, 0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5e17}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("provenance line") {
  CHECK(provenance_line(0xabcULL) == "# chaosgan 0.1.0 config_hash=0000000000000abc");
}

TEST_CASE("parse_csv") {
  std::istringstream in("# comment\na,b\n1,2\n# mid\n3,4\n");
  const CsvTable t = parse_csv(in);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == "3");
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(t.column("c"), ConfigError);

  std::istringstream empty("# only comments\n");
  CHECK_THROWS_AS(parse_csv(empty), ConfigError);
  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(parse_csv(ragged), ConfigError);
}

TEST_CASE("CsvWriter") {
  CsvWriter w({"x", "y"}, 1);
  w.add({"1", "2"});
  CHECK(w.size() == 1);
  CHECK_THROWS_AS(w.add({"1"}), ShapeError);
  std::ostringstream out;
  w.write(out);
  CHECK(out.str() == "# chaosgan 0.1.0 config_hash=0000000000000001\nx,y\n1,2\n");
  std::istringstream back(out.str());
  CHECK(parse_csv(back).rows.size() == 1);
}

TEST_CASE("ConfigFile parsing") {
  std::istringstream in(
      "# top comment\n[run]\nseed = 7\n; other comment\ntrials=3\n\n[gan]\n"
      "generator_hidden = 8, 16\nlearning_rate = 0.5\nflag = yes\nnames = a , b\n");
  const ConfigFile f = ConfigFile::parse(in);
  CHECK(f.has("run.seed"));
  CHECK(f.get_u64("run.seed", 0) == 7);
  CHECK(f.get_size("run.trials", 0) == 3);
  CHECK(f.get_size("run.missing", 9) == 9);
  CHECK(f.get_sizes("gan.generator_hidden", {}) == std::vector<std::size_t>{8, 16});
  CHECK(f.get_double("gan.learning_rate", 0) == 0.5);
  CHECK(f.get_bool("gan.flag", false));
  CHECK(f.get_list("gan.names", {}) == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(f.get_int("gan.learning_rate", 0), ConfigError);
  CHECK_THROWS_AS(f.get_double("gan.names", 0), ConfigError);
}

TEST_CASE("ConfigFile errors") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return ConfigFile::parse(in, "t.ini");
  };
  CHECK_THROWS_AS(parse("x = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nnovalue\n"), ConfigError);
}

TEST_CASE("ConfigFile canonical text and hash") {
  std::istringstream a("[b]\ny = 2\n[a]\nx = 1\n");
  std::istringstream b("[a]\nx=1\n\n[b]\ny= 2\n");
  const ConfigFile fa = ConfigFile::parse(a);
  const ConfigFile fb = ConfigFile::parse(b);
  CHECK(fa.to_string() == fb.to_string());
  CHECK(fa.hash() == fb.hash());
  std::istringstream again(fa.to_string());
  CHECK(ConfigFile::parse(again).to_string() == fa.to_string());
  ConfigFile fc = fa;
  fc.set("a.x", "2");
  CHECK(fc.hash() != fa.hash());
}

TEST_CASE("ExperimentConfig round-trips through its config file") {
  ExperimentConfig c = ExperimentConfig::defaults();
  c.validate();
  const ConfigFile f = c.to_config_file();
  ExperimentConfig d = ExperimentConfig::defaults(true);
  d.apply(f);
  CHECK(d.to_config_file().to_string() == f.to_string());
  CHECK(d.hash() == c.hash());

  std::istringstream in("[run]\nseed = 11\ntrials = 2\n[gan]\ngenerator_hidden = 4\n");
  ExperimentConfig e = ExperimentConfig::defaults();
  e.apply(ConfigFile::parse(in));
  CHECK(e.seed == 11);
  CHECK(e.trials == 2);
  CHECK(e.gan.generator_hidden == std::vector<std::size_t>{4});
  CHECK(e.hash() != c.hash());
}

TEST_CASE("ExperimentConfig rejects unknown keys and bad values") {
  ExperimentConfig c = ExperimentConfig::defaults();
  std::istringstream unknown("[run]\nsed = 1\n");
  CHECK_THROWS_AS(c.apply(ConfigFile::parse(unknown)), ConfigError);
  std::istringstream bad("[run]\ntrials = many\n");
  CHECK_THROWS_AS(c.apply(ConfigFile::parse(bad)), ConfigError);

  ExperimentConfig z = ExperimentConfig::defaults();
  z.trials = 0;
  CHECK_THROWS_AS(z.validate(), ConfigError);
  ExperimentConfig s = ExperimentConfig::defaults();
  s.sources = {"nonsense"};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("paper-scale defaults") {
  const ExperimentConfig p = ExperimentConfig::defaults(true);
  CHECK(p.paper_scale);
  CHECK(p.gan.image_height == 64);
  CHECK(p.diversity.image_count == 10000);
  CHECK(p.diversity.pair_count == 1000);
  CHECK(p.proximity.references == 200);
  CHECK(p.proximity.neighbors == 100);
  CHECK(p.proximity.fixed_prefix == 90);
  CHECK(p.sources.size() == 7);
  CHECK(p.sweep_strides.size() == 10);
}
