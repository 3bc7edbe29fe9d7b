#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "chaosgan/config_file.hpp"
#include "chaosgan/dataset.hpp"
#include "chaosgan/gan.hpp"
#include "chaosgan/latent_source.hpp"
#include "chaosgan/metrics.hpp"
#include "chaosgan/trace_io.hpp"

namespace chaosgan {

/// Everything a command needs; built from defaults, then a config file, then CLI flags.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 10;
  bool paper_scale = false;
  bool write_training_logs = false;  // per-iteration logs include wall-clock times
  bool save_models = false;
  bool epoch_metrics = false;

  GanConfig gan;
  std::size_t dataset_count = 2048;
  std::filesystem::path dataset_directory;  // empty: synthetic blob faces

  std::filesystem::path trace_manifest;  // empty: synthetic chaos
  SyntheticChaosConfig chaos;            // chaos.length == 0 sizes traces from the rows needed
  int measurements = 100;

  ProximityConfig proximity;
  DiversityConfig diversity;

  std::vector<std::string> sources;  // train-eval

  std::vector<std::string> characterize_sources;
  std::size_t characterize_rows = 100000;
  std::size_t autocorr_maxlag = 50;
  std::size_t histogram_bins = 64;

  std::vector<std::size_t> sweep_strides;
  std::string sweep_domain = "time";

  std::vector<std::string> retrieval_train_sources;
  std::vector<std::string> retrieval_sources;
  std::size_t distance_rows = 1000;
  int distance_bits = 8;

  /// Desk-scale defaults, or the paper's sizes when `paper_scale`.
  static ExperimentConfig defaults(bool paper_scale = false);

  /// Applies every key in `file`; unknown keys and bad values throw ConfigError.
  void apply(const ConfigFile& file);
  /// Full effective configuration.
  ConfigFile to_config_file() const;
  std::uint64_t hash() const { return to_config_file().hash(); }
  void validate() const;

  DatasetSpec dataset_spec() const;
  /// Pseudorandom sources get a seed derived from (seed, role, label).
  SourceSpec source_spec(const std::string& label, const std::string& role) const;
  /// Generator/discriminator init and real-batch seed for trial n; shared by all sources.
  GanConfig trial_gan_config(std::size_t trial) const;
};

/// Rows a bounded source must hold so that every trial fits: 128 (trials - 1) + per-trial use.
std::size_t rows_needed(const ExperimentConfig& cfg, std::size_t per_trial_rows);
/// Training consumes 2 batch_size rows per iteration.
std::size_t training_rows(const GanConfig& gan);

/**
 * Loads the manifest when one is configured; otherwise synthesizes traces long
 * enough that a source at `max_stride` yields `rows` rows in either arrangement.
 */
std::shared_ptr<const TraceSet> experiment_traces(const ExperimentConfig& cfg, std::size_t rows,
                                                  std::size_t max_stride);

struct CommandReport {
  std::size_t failures = 0;
  std::vector<std::filesystem::path> outputs;
};

CommandReport cmd_characterize(const ExperimentConfig& cfg, const std::filesystem::path& out);
CommandReport cmd_train_eval(const ExperimentConfig& cfg, const std::filesystem::path& out);
CommandReport cmd_si_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out);
CommandReport cmd_retrieval_matrix(const ExperimentConfig& cfg, const std::filesystem::path& out);
/// Writes the trace set (and its manifest) that the other commands would synthesize.
CommandReport cmd_synth_traces(const ExperimentConfig& cfg, const std::filesystem::path& out,
                               std::size_t length);

/// Mean and sample standard deviation; std is NaN for fewer than two values.
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};
MeanStd mean_std(const std::vector<double>& values);

}  // namespace chaosgan
