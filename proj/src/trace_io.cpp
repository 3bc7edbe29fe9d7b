#include "chaosgan/trace_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "chaosgan/error.hpp"
#include "chaosgan/rng.hpp"

namespace chaosgan {
namespace fs = std::filesystem;

namespace {

// Alternating-sign detector taps on the delay grid: sin(pi (j + 1) / 5), j = 0..3.
constexpr std::size_t kDetectorTaps = 4;
constexpr std::size_t kBurnIn = 1000;

std::array<double, kDetectorTaps> detector_taps() {
  std::array<double, kDetectorTaps> taps{};
  for (std::size_t j = 0; j < kDetectorTaps; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    taps[j] = sign * std::sin(std::numbers::pi * static_cast<double>(j + 1) /
                              static_cast<double>(kDetectorTaps + 1));
  }
  return taps;
}

// Ties to even under the default floating-point rounding mode.
double round_half_even(double v) { return std::nearbyint(v); }

template <typename T>
T parse_number(const std::string& text, const std::string& where, const std::string& key) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw TraceError(where + ": field '" + key + "': not an integer: '" + text + "'");
  }
  return value;
}

}  // namespace

void ChaosTrace::validate() const {
  if (channel_id < 1 || channel_id > 4) {
    throw TraceError("trace: channel_id " + std::to_string(channel_id) + " outside 1..4");
  }
  if (measurement_index < 1) {
    throw TraceError("trace: measurement_index must be >= 1");
  }
  if (sampling_interval_ps <= 0) {
    throw TraceError("trace: sampling_interval_ps must be positive");
  }
  if (samples.empty()) {
    throw TraceError("trace: no samples");
  }
}

int TraceManifest::channel_count() const {
  std::set<int> ids;
  for (const auto& e : entries) ids.insert(e.channel);
  return static_cast<int>(ids.size());
}

int TraceManifest::measurement_count() const {
  std::set<int> ids;
  for (const auto& e : entries) ids.insert(e.measurement);
  return static_cast<int>(ids.size());
}

TraceManifest parse_manifest(std::istream& in, const fs::path& base_dir,
                             const std::string& source_name) {
  TraceManifest manifest;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::string where = source_name + ":" + std::to_string(line_no);

    std::map<std::string, std::string> fields;
    std::istringstream tokens(line);
    std::string token;
    while (std::getline(tokens, token, '\t')) {
      if (token.empty()) continue;
      const auto eq = token.find('=');
      if (eq == std::string::npos) {
        throw TraceError(where + ": expected key=value, got '" + token + "'");
      }
      fields[token.substr(0, eq)] = token.substr(eq + 1);
    }
    auto require = [&](const char* key) -> const std::string& {
      auto it = fields.find(key);
      if (it == fields.end()) throw TraceError(where + ": missing field '" + key + "'");
      return it->second;
    };

    ManifestEntry entry;
    fs::path p = require("path");
    entry.path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    entry.channel = parse_number<int>(require("channel"), where, "channel");
    entry.measurement = parse_number<int>(require("measurement"), where, "measurement");
    entry.si_ps = parse_number<int>(require("si_ps"), where, "si_ps");
    entry.n = parse_number<std::size_t>(require("n"), where, "n");
    if (entry.channel < 1 || entry.channel > 4) {
      throw TraceError(where + ": field 'channel': must be in 1..4");
    }
    if (entry.measurement < 1) throw TraceError(where + ": field 'measurement': must be >= 1");
    if (entry.si_ps <= 0) throw TraceError(where + ": field 'si_ps': must be positive");
    if (entry.n == 0) throw TraceError(where + ": field 'n': must be positive");
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

TraceManifest read_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw TraceError(manifest_path.string() + ": cannot open manifest");
  return parse_manifest(in, manifest_path.parent_path(), manifest_path.string());
}

void write_manifest(const TraceManifest& manifest, std::ostream& out, const fs::path& base_dir) {
  for (const auto& e : manifest.entries) {
    fs::path p = e.path;
    if (!base_dir.empty()) {
      const auto rel = e.path.lexically_relative(base_dir);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    out << "path=" << p.generic_string() << "\tchannel=" << e.channel
        << "\tmeasurement=" << e.measurement << "\tsi_ps=" << e.si_ps << "\tn=" << e.n << '\n';
  }
}

ChaosTrace load_trace(const ManifestEntry& entry) {
  const std::string name = entry.path.string();
  std::error_code ec;
  if (!fs::is_regular_file(entry.path, ec)) throw TraceError(name + ": file not found");
  const auto bytes = fs::file_size(entry.path, ec);
  if (ec) throw TraceError(name + ": cannot stat file");
  if (bytes != entry.n || bytes == 0) {
    throw TraceError(name + ": length mismatch: field 'n' declares " + std::to_string(entry.n) +
                     " samples but file has " + std::to_string(bytes) + " bytes");
  }

  ChaosTrace trace;
  trace.channel_id = entry.channel;
  trace.measurement_index = entry.measurement;
  trace.sampling_interval_ps = entry.si_ps;
  trace.samples.resize(entry.n);
  std::ifstream in(entry.path, std::ios::binary);
  in.read(reinterpret_cast<char*>(trace.samples.data()), static_cast<std::streamsize>(entry.n));
  if (in.gcount() != static_cast<std::streamsize>(entry.n)) {
    throw TraceError(name + ": short read");
  }
  return trace;
}

void save_trace(const ChaosTrace& trace, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TraceError(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(trace.samples.data()),
            static_cast<std::streamsize>(trace.samples.size()));
  if (!out) throw TraceError(path.string() + ": write failed");
}

void SyntheticChaosConfig::validate() const {
  if (length == 0) throw TraceError("synthetic chaos: length must be positive");
  if (delay_lag == 0) throw TraceError("synthetic chaos: delay_lag must be positive");
  if (delay_lag >= length) throw TraceError("synthetic chaos: delay_lag must be < length");
  if (!std::isfinite(feedback_strength) || !std::isfinite(damping)) {
    throw TraceError("synthetic chaos: non-finite parameter");
  }
  if (!(output_scale > 0.0) || !std::isfinite(output_scale)) {
    throw TraceError("synthetic chaos: output_scale must be positive");
  }
}

ChaosTrace generate_synthetic_trace(const SyntheticChaosConfig& config, int channel_id,
                                    int measurement_index, int sampling_interval_ps) {
  config.validate();
  const std::size_t lag = config.delay_lag;
  const std::size_t history = (kDetectorTaps - 1) * lag;
  const std::size_t total = kBurnIn + history + config.length;

  std::vector<double> x(total + lag);
  Rng rng(config.seed);
  for (std::size_t t = 0; t < lag; ++t) x[t] = rng.uniform(-1.0, 1.0);
  for (std::size_t t = lag; t < x.size(); ++t) {
    x[t] = config.feedback_strength * std::sin(x[t - lag]) - config.damping * x[t - 1];
  }

  const auto taps = detector_taps();
  const std::size_t first = lag + kBurnIn + history;
  std::vector<double> y(config.length);
  double sum = 0.0;
  for (std::size_t t = 0; t < config.length; ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < kDetectorTaps; ++j) acc += taps[j] * x[first + t - j * lag];
    y[t] = acc;
    sum += acc;
  }
  const double mean = sum / static_cast<double>(config.length);
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double variance = ss / static_cast<double>(config.length);

  // Collapse check on the unit-gain 8-bit scale, before standardization.
  if (!(variance * config.output_scale * config.output_scale >= 1.0)) {
    throw TraceError("synthetic chaos: degenerate dynamics (variance below 1 at 8-bit scale)");
  }

  const double inv_sd = 1.0 / std::sqrt(variance);
  ChaosTrace trace;
  trace.channel_id = channel_id;
  trace.measurement_index = measurement_index;
  trace.sampling_interval_ps = sampling_interval_ps;
  trace.samples.resize(config.length);
  for (std::size_t t = 0; t < config.length; ++t) {
    const double q = round_half_even((y[t] - mean) * inv_sd * config.output_scale);
    trace.samples[t] = static_cast<std::int8_t>(std::clamp(q, -128.0, 127.0));
  }
  return trace;
}

TraceSet::TraceSet(std::vector<ChaosTrace> traces) {
  if (traces.empty()) throw TraceError("trace set: no traces");
  std::set<int> channel_ids;
  std::set<int> measurement_ids;
  for (const auto& t : traces) {
    t.validate();
    channel_ids.insert(t.channel_id);
    measurement_ids.insert(t.measurement_index);
  }
  channels_ = static_cast<int>(channel_ids.size());
  measurements_ = static_cast<int>(measurement_ids.size());
  if (*channel_ids.rbegin() != channels_ || *measurement_ids.rbegin() != measurements_) {
    throw TraceError("trace set: channel and measurement ids must be contiguous from 1");
  }
  if (traces.size() != static_cast<std::size_t>(channels_) * measurements_) {
    throw TraceError("trace set: expected one trace per (channel, measurement)");
  }
  length_ = traces.front().size();
  si_ps_ = traces.front().sampling_interval_ps;
  for (const auto& t : traces) {
    if (t.size() != length_) throw TraceError("trace set: traces differ in length");
    if (t.sampling_interval_ps != si_ps_) {
      throw TraceError("trace set: traces differ in sampling interval");
    }
  }
  std::sort(traces.begin(), traces.end(), [](const ChaosTrace& a, const ChaosTrace& b) {
    return std::pair(a.measurement_index, a.channel_id) <
           std::pair(b.measurement_index, b.channel_id);
  });
  for (std::size_t i = 1; i < traces.size(); ++i) {
    if (traces[i].measurement_index == traces[i - 1].measurement_index &&
        traces[i].channel_id == traces[i - 1].channel_id) {
      throw TraceError("trace set: duplicate (channel, measurement)");
    }
  }
  traces_ = std::move(traces);
}

const ChaosTrace& TraceSet::at(int channel, int measurement) const {
  if (channel < 1 || channel > channels_ || measurement < 1 || measurement > measurements_) {
    throw TraceError("trace set: (channel " + std::to_string(channel) + ", measurement " +
                     std::to_string(measurement) + ") out of range");
  }
  return traces_[static_cast<std::size_t>(measurement - 1) * channels_ + (channel - 1)];
}

TraceSet load_trace_set(const TraceManifest& manifest) {
  std::vector<ChaosTrace> traces;
  traces.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) traces.push_back(load_trace(e));
  return TraceSet(std::move(traces));
}

TraceSet synthesize_trace_set(const SyntheticChaosConfig& base, int measurements, int channels,
                              int sampling_interval_ps) {
  if (measurements < 1 || channels < 1 || channels > 4) {
    throw TraceError("synthetic trace set: invalid channel or measurement count");
  }
  std::vector<ChaosTrace> traces;
  traces.reserve(static_cast<std::size_t>(measurements) * channels);
  for (int m = 1; m <= measurements; ++m) {
    for (int c = 1; c <= channels; ++c) {
      SyntheticChaosConfig cfg = base;
      cfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(c) * 100'003ULL + m);
      traces.push_back(generate_synthetic_trace(cfg, c, m, sampling_interval_ps));
    }
  }
  return TraceSet(std::move(traces));
}

TraceManifest save_trace_set(const TraceSet& set, const fs::path& dir) {
  fs::create_directories(dir);
  TraceManifest manifest;
  for (const auto& t : set.traces()) {
    char name[32];
    std::snprintf(name, sizeof name, "ch%d_m%03d.i8", t.channel_id, t.measurement_index);
    const fs::path path = dir / name;
    save_trace(t, path);
    manifest.entries.push_back({path, t.channel_id, t.measurement_index,
                                t.sampling_interval_ps, t.size()});
  }
  std::ofstream out(dir / "manifest.tsv");
  if (!out) throw TraceError((dir / "manifest.tsv").string() + ": cannot open for writing");
  write_manifest(manifest, out, dir);
  return manifest;
}

}  // namespace chaosgan
