#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chaosgan/config_file.hpp"
#include "chaosgan/csv.hpp"
#include "chaosgan/error.hpp"
#include "chaosgan/experiment.hpp"
#include "chaosgan/plot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Config file (key = value with [section] headers)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory")->required();
  cmd->add_option("--seed", f.seed, "Global seed");
  cmd->add_option("--trials", f.trials, "Number of trials");
  cmd->add_flag("--paper-scale", f.paper_scale, "Use the paper's network and run sizes");
}

chaosgan::ExperimentConfig build_config(const CommonFlags& f) {
  chaosgan::ConfigFile file;
  if (!f.config.empty()) file = chaosgan::ConfigFile::load(f.config);
  const bool paper = f.paper_scale || file.get_bool("run.paper_scale", false);
  auto cfg = chaosgan::ExperimentConfig::defaults(paper);
  cfg.apply(file);
  if (f.paper_scale) cfg.paper_scale = true;
  if (f.seed) cfg.seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  cfg.validate();
  return cfg;
}

int finish(const chaosgan::CommandReport& report) {
  if (report.failures > 0) {
    std::cerr << "chaosgan: " << report.failures
              << " trial(s) failed; see the status column in the output CSVs\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chaos-driven latent sources for GAN training and evaluation"};
  app.set_version_flag("--version", std::string("chaosgan ") + chaosgan::kVersion);
  app.require_subcommand(1);

  CommonFlags characterize_flags;
  auto* characterize = app.add_subcommand("characterize", "Histograms and autocorrelations of latent sources");
  add_common(characterize, characterize_flags);

  CommonFlags train_flags;
  auto* train_eval = app.add_subcommand("train-eval", "Train per source and score proximity and diversity");
  add_common(train_eval, train_flags);

  CommonFlags sweep_flags;
  auto* si_sweep = app.add_subcommand("si-sweep", "Proximity vs sampling interval, original and surrogate");
  add_common(si_sweep, sweep_flags);

  CommonFlags retrieval_flags;
  auto* retrieval = app.add_subcommand("retrieval", "Train-source x retrieve-source matrix");
  add_common(retrieval, retrieval_flags);

  CommonFlags synth_flags;
  std::size_t synth_length = 100000;
  auto* synth = app.add_subcommand("synth-traces", "Write synthetic chaos traces and a manifest");
  add_common(synth, synth_flags);
  synth->add_option("--length", synth_length, "Samples per trace")->check(CLI::PositiveNumber);

  std::string plot_csv;
  std::string plot_out;
  std::string plot_kind = "line";
  std::string plot_x;
  std::vector<std::string> plot_y;
  std::string plot_title;
  auto* plot = app.add_subcommand("plot", "Render a CSV as SVG and PGM");
  plot->add_option("--csv", plot_csv, "Input CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "Output path without extension")->required();
  plot->add_option("--kind", plot_kind, "line or scatter");
  plot->add_option("--x", plot_x, "x column (default: first)");
  plot->add_option("--y", plot_y, "y columns (default: all numeric)");
  plot->add_option("--title", plot_title, "Plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*characterize) {
      return finish(chaosgan::cmd_characterize(build_config(characterize_flags), characterize_flags.out));
    }
    if (*train_eval) return finish(chaosgan::cmd_train_eval(build_config(train_flags), train_flags.out));
    if (*si_sweep) return finish(chaosgan::cmd_si_sweep(build_config(sweep_flags), sweep_flags.out));
    if (*retrieval) {
      return finish(chaosgan::cmd_retrieval_matrix(build_config(retrieval_flags), retrieval_flags.out));
    }
    if (*synth) {
      return finish(chaosgan::cmd_synth_traces(build_config(synth_flags), synth_flags.out, synth_length));
    }
    if (*plot) {
      chaosgan::PlotOptions o;
      o.kind = chaosgan::parse_plot_kind(plot_kind);
      o.title = plot_title;
      o.x_column = plot_x;
      o.y_columns = plot_y;
      const std::filesystem::path stem(plot_out);
      if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
      chaosgan::plot_csv(plot_csv, stem, o);
      return kExitOk;
    }
  } catch (const chaosgan::ConfigError& e) {
    std::cerr << "chaosgan: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "chaosgan: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
