#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace chaosgan {

/// One oscilloscope channel of one measurement: signed 8-bit samples at a fixed interval.
struct ChaosTrace {
  int channel_id = 1;         // 1..4
  int measurement_index = 1;  // 1..M
  int sampling_interval_ps = 10;
  std::vector<std::int8_t> samples;

  std::size_t size() const noexcept { return samples.size(); }
  /// Throws TraceError if metadata is out of range or the trace is empty.
  void validate() const;
};

struct ManifestEntry {
  std::filesystem::path path;  // resolved (absolute or relative to cwd)
  int channel = 0;
  int measurement = 0;
  int si_ps = 0;
  std::size_t n = 0;
};

/// Tab-separated `key=value` records, one trace file per line.
struct TraceManifest {
  std::vector<ManifestEntry> entries;

  int channel_count() const;
  int measurement_count() const;
};

/// Relative `path=` values are resolved against `base_dir`. `source_name` is used in error messages.
TraceManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir,
                             const std::string& source_name = "manifest");
TraceManifest read_manifest(const std::filesystem::path& manifest_path);
/// Paths are written relative to `base_dir` when they live under it.
void write_manifest(const TraceManifest& manifest, std::ostream& out,
                    const std::filesystem::path& base_dir = {});

/// Reads raw signed bytes; the file must hold exactly `entry.n` bytes.
ChaosTrace load_trace(const ManifestEntry& entry);
void save_trace(const ChaosTrace& trace, const std::filesystem::path& path);

/**
 * Parameters of the synthetic delayed-feedback chaos source.
 *
 * The driver is the delayed sine map
 *   x[t] = feedback_strength * sin(x[t - delay_lag]) - damping * x[t - 1],
 * observed through a short alternating-sign filter on the delay grid (an
 * AC-coupled detector), standardized, scaled by output_scale and quantized
 * to signed 8 bits.
 */
struct SyntheticChaosConfig {
  std::uint64_t seed = 1;
  std::size_t length = 1'000'000;
  std::size_t delay_lag = 5;
  double feedback_strength = 20.0;
  double damping = 0.1;
  // +-3 sigma lands on +-110.
  double output_scale = 110.0 / 3.0;

  void validate() const;
};

/// Deterministic in `config`. Throws TraceError("degenerate dynamics") on a collapsed regime.
ChaosTrace generate_synthetic_trace(const SyntheticChaosConfig& config, int channel_id = 1,
                                    int measurement_index = 1, int sampling_interval_ps = 10);

/// Channel x measurement grid of equally long traces.
class TraceSet {
 public:
  TraceSet() = default;
  /// `traces` in any order; every (channel, measurement) pair must appear exactly once.
  explicit TraceSet(std::vector<ChaosTrace> traces);

  int channel_count() const noexcept { return channels_; }
  int measurement_count() const noexcept { return measurements_; }
  std::size_t length() const noexcept { return length_; }
  int sampling_interval_ps() const noexcept { return si_ps_; }
  /// One-based channel and measurement.
  const ChaosTrace& at(int channel, int measurement) const;
  const std::vector<ChaosTrace>& traces() const noexcept { return traces_; }

 private:
  std::vector<ChaosTrace> traces_;  // measurement-major, channel-minor
  int channels_ = 0;
  int measurements_ = 0;
  std::size_t length_ = 0;
  int si_ps_ = 0;
};

TraceSet load_trace_set(const TraceManifest& manifest);

/// Independently seeded traces for every (channel, measurement); `base.seed` is the root.
TraceSet synthesize_trace_set(const SyntheticChaosConfig& base, int measurements = 100,
                              int channels = 4, int sampling_interval_ps = 10);

/// Writes `ch<c>_m<mmm>.i8` files plus `manifest.tsv` into `dir`; returns the manifest.
TraceManifest save_trace_set(const TraceSet& set, const std::filesystem::path& dir);

}  // namespace chaosgan
