#include "chaosgan/latent_source.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "binary_io.hpp"
#include "chaosgan/error.hpp"
#include "chaosgan/rng.hpp"

namespace chaosgan {

namespace {

constexpr std::size_t kRequiredMeasurements = 100;
constexpr std::uint32_t kLatentFormatVersion = 1;

std::string format_sigma(double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", sigma);
  return buf;
}

std::size_t stride_for(const TraceSet& traces, int si_ps) {
  const int base = traces.sampling_interval_ps();
  if (si_ps <= 0 || base <= 0 || si_ps % base != 0) {
    throw ConfigError("sampling interval " + std::to_string(si_ps) +
                      " ps is not a positive multiple of the trace interval " +
                      std::to_string(base) + " ps");
  }
  return static_cast<std::size_t>(si_ps / base);
}

}  // namespace

SourceSpec SourceSpec::uniform(std::uint64_t seed) {
  SourceSpec s;
  s.kind = Kind::Uniform;
  s.seed = seed;
  return s;
}

SourceSpec SourceSpec::normal_edge(double sigma, std::uint64_t seed) {
  SourceSpec s;
  s.kind = Kind::NormalEdge;
  s.sigma = sigma;
  s.seed = seed;
  return s;
}

SourceSpec SourceSpec::chaos_time(int si_ps) {
  SourceSpec s;
  s.kind = Kind::ChaosTime;
  s.si_ps = si_ps;
  return s;
}

SourceSpec SourceSpec::chaos_space(int si_ps) {
  SourceSpec s;
  s.kind = Kind::ChaosSpace;
  s.si_ps = si_ps;
  return s;
}

SourceSpec SourceSpec::surrogate_time(int si_ps, std::uint64_t shuffle_seed) {
  SourceSpec s;
  s.kind = Kind::SurrogateChaosTime;
  s.si_ps = si_ps;
  s.shuffle_seed = shuffle_seed;
  return s;
}

SourceSpec SourceSpec::surrogate_space(int si_ps, std::uint64_t shuffle_seed) {
  SourceSpec s;
  s.kind = Kind::SurrogateChaosSpace;
  s.si_ps = si_ps;
  s.shuffle_seed = shuffle_seed;
  return s;
}

std::string SourceSpec::label() const {
  const std::string si = "_si" + std::to_string(si_ps);
  switch (kind) {
    case Kind::Uniform: return "rand";
    case Kind::NormalEdge: return "randn" + format_sigma(sigma);
    case Kind::ChaosTime: return "chaos_time" + si;
    case Kind::ChaosSpace: return "chaos_space" + si;
    case Kind::SurrogateChaosTime: return "surrogate_time" + si;
    case Kind::SurrogateChaosSpace: return "surrogate_space" + si;
  }
  return "unknown";
}

void SourceSpec::validate() const {
  if (kind == Kind::NormalEdge && !(sigma > 0.0 && std::isfinite(sigma))) {
    throw ConfigError("source " + label() + ": sigma must be positive");
  }
  if (chaos_backed() && si_ps <= 0) {
    throw ConfigError("source " + label() + ": si_ps must be positive");
  }
}

SourceSpec parse_source_label(const std::string& label) {
  auto parse_int = [&](const std::string& text) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ConfigError("unknown source '" + label + "'");
    }
    return v;
  };
  if (label == "rand") return SourceSpec::uniform(0);
  if (label.rfind("randn", 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string rest = label.substr(5);
      const double sigma = std::stod(rest, &used);
      if (used != rest.size()) throw ConfigError("");
      return SourceSpec::normal_edge(sigma, 0);
    } catch (const std::exception&) {
      throw ConfigError("unknown source '" + label + "'");
    }
  }
  const std::pair<const char*, SourceSpec (*)(int)> plain[] = {
      {"chaos_time_si", &SourceSpec::chaos_time},
      {"chaos_space_si", &SourceSpec::chaos_space},
  };
  for (const auto& [prefix, make] : plain) {
    const std::string p = prefix;
    if (label.rfind(p, 0) == 0) return make(parse_int(label.substr(p.size())));
  }
  if (label.rfind("surrogate_time_si", 0) == 0) {
    return SourceSpec::surrogate_time(parse_int(label.substr(17)), 0);
  }
  if (label.rfind("surrogate_space_si", 0) == 0) {
    return SourceSpec::surrogate_space(parse_int(label.substr(18)), 0);
  }
  throw ConfigError("unknown source '" + label + "'");
}

LatentMatrix::LatentMatrix(std::vector<double> values, SourceSpec source)
    : values_(std::move(values)), source_(source) {
  if (values_.size() % kLatentDim != 0) {
    throw ShapeError("latent matrix: element count " + std::to_string(values_.size()) +
                     " is not a multiple of " + std::to_string(kLatentDim));
  }
}

LatentMatrix LatentMatrix::slice(std::size_t first_row, std::size_t count) const {
  if (first_row + count > rows()) throw ShapeError("latent matrix: slice out of range");
  const auto begin = values_.begin() + static_cast<std::ptrdiff_t>(first_row * kLatentDim);
  return LatentMatrix(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * kLatentDim)),
                      source_);
}

PackedSequences packed_sequences(const TraceSet& traces, int si_ps) {
  if (traces.channel_count() != 4) {
    throw ConfigError("packing needs exactly 4 channels, got " +
                      std::to_string(traces.channel_count()));
  }
  if (static_cast<std::size_t>(traces.measurement_count()) < kRequiredMeasurements) {
    throw ConfigError("packing needs 100 measurements per channel, got " +
                      std::to_string(traces.measurement_count()));
  }
  const std::size_t stride = stride_for(traces, si_ps);
  const std::size_t len = traces.length() / stride;

  PackedSequences out(kRequiredMeasurements);
  for (std::size_t m = 0; m < kRequiredMeasurements; ++m) {
    const int meas = static_cast<int>(m + 1);
    const auto& c1 = traces.at(1, meas).samples;
    const auto& c2 = traces.at(2, meas).samples;
    const auto& c3 = traces.at(3, meas).samples;
    const auto& c4 = traces.at(4, meas).samples;
    auto& seq = out[m];
    seq.resize(len);
    for (std::size_t t = 0; t < len; ++t) {
      const std::size_t i = t * stride;
      seq[t] = pack_u32(static_cast<std::uint8_t>(c1[i]), static_cast<std::uint8_t>(c2[i]),
                        static_cast<std::uint8_t>(c3[i]), static_cast<std::uint8_t>(c4[i]));
    }
  }
  return out;
}

LatentMatrix arrange_time(const PackedSequences& sequences, SourceSpec source) {
  if (sequences.size() < kLatentDim) {
    throw ConfigError("time-domain arrangement needs 100 sequences");
  }
  std::size_t rows = sequences[0].size();
  for (std::size_t i = 0; i < kLatentDim; ++i) rows = std::min(rows, sequences[i].size());
  std::vector<double> values(rows * kLatentDim);
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t i = 0; i < kLatentDim; ++i) values[t * kLatentDim + i] = sequences[i][t];
  }
  return LatentMatrix(std::move(values), source);
}

LatentMatrix arrange_space(const PackedSequences& sequences, SourceSpec source) {
  std::vector<double> values;
  std::size_t total = 0;
  for (const auto& seq : sequences) total += seq.size() / kLatentDim * kLatentDim;
  values.reserve(total);
  for (const auto& seq : sequences) {
    const std::size_t usable = seq.size() / kLatentDim * kLatentDim;
    values.insert(values.end(), seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(usable));
  }
  return LatentMatrix(std::move(values), source);
}

LatentMatrix build_time_domain(const TraceSet& traces, int si_ps) {
  return arrange_time(packed_sequences(traces, si_ps), SourceSpec::chaos_time(si_ps));
}

LatentMatrix build_space_domain(const TraceSet& traces, int si_ps) {
  return arrange_space(packed_sequences(traces, si_ps), SourceSpec::chaos_space(si_ps));
}

LatentMatrix sample_uniform(std::uint64_t seed, std::size_t rows) {
  Rng rng(seed);
  std::vector<double> values(rows * kLatentDim);
  for (auto& v : values) v = rng.uniform(-1.0, 1.0);
  return LatentMatrix(std::move(values), SourceSpec::uniform(seed));
}

double normal_edge_transform(double g) noexcept {
  const double shifted = g >= 0.0 ? g - 1.0 : g + 1.0;
  return std::clamp(shifted, -1.0, 1.0);
}

LatentMatrix sample_normal_edge(std::uint64_t seed, double sigma, std::size_t rows) {
  SourceSpec spec = SourceSpec::normal_edge(sigma, seed);
  spec.validate();
  Rng rng(seed);
  std::vector<double> values(rows * kLatentDim);
  for (auto& v : values) v = normal_edge_transform(sigma * rng.normal());
  return LatentMatrix(std::move(values), spec);
}

std::vector<double> surrogate_shuffle(std::span<const double> sequence,
                                      std::uint64_t shuffle_seed) {
  std::vector<double> out(sequence.begin(), sequence.end());
  Rng rng(shuffle_seed);
  for (std::size_t i = out.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(out[i - 1], out[j]);
  }
  return out;
}

PackedSequences surrogate_shuffle(const PackedSequences& sequences, std::uint64_t shuffle_seed) {
  std::vector<double> flat;
  for (const auto& s : sequences) flat.insert(flat.end(), s.begin(), s.end());
  flat = surrogate_shuffle(flat, shuffle_seed);
  PackedSequences out(sequences.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto begin = flat.begin() + static_cast<std::ptrdiff_t>(offset);
    out[i].assign(begin, begin + static_cast<std::ptrdiff_t>(sequences[i].size()));
    offset += sequences[i].size();
  }
  return out;
}

LatentMatrix build_matrix(const SourceSpec& spec, const TraceSet* traces, std::size_t rows) {
  spec.validate();
  switch (spec.kind) {
    case SourceSpec::Kind::Uniform: return sample_uniform(spec.seed, rows);
    case SourceSpec::Kind::NormalEdge: return sample_normal_edge(spec.seed, spec.sigma, rows);
    default: break;
  }
  if (traces == nullptr) throw ConfigError("source " + spec.label() + " needs chaos traces");
  PackedSequences seqs = packed_sequences(*traces, spec.si_ps);
  if (spec.surrogate()) seqs = surrogate_shuffle(seqs, spec.shuffle_seed);
  return spec.space_domain() ? arrange_space(seqs, spec) : arrange_time(seqs, spec);
}

LatentStream::LatentStream(std::shared_ptr<const LatentMatrix> matrix, int trial_index)
    : matrix_(std::move(matrix)), trial_(trial_index) {
  if (!matrix_) throw ConfigError("latent stream: null matrix");
  if (trial_index < 1) throw ConfigError("latent stream: trial index must be >= 1");
  spec_ = matrix_->source();
  cursor_ = kTrialRowOffset * static_cast<std::size_t>(trial_index - 1);
}

LatentStream::LatentStream(const SourceSpec& pseudorandom, int trial_index)
    : spec_(pseudorandom), trial_(trial_index) {
  if (pseudorandom.chaos_backed()) {
    throw ConfigError("latent stream: chaos source " + pseudorandom.label() +
                      " must be backed by a matrix");
  }
  if (trial_index < 1) throw ConfigError("latent stream: trial index must be >= 1");
  pseudorandom.validate();
  stream_seed_ = derive_seed(pseudorandom.seed, static_cast<std::uint64_t>(trial_index));
}

std::size_t LatentStream::remaining() const noexcept {
  if (!matrix_) return static_cast<std::size_t>(-1);
  return cursor_ >= matrix_->rows() ? 0 : matrix_->rows() - cursor_;
}

LatentMatrix LatentStream::next_batch(std::size_t batch) {
  if (matrix_) {
    if (cursor_ + batch > matrix_->rows()) {
      throw SourceExhausted("source exhausted: " + spec_.label() + " has " +
                            std::to_string(matrix_->rows()) + " rows, requested rows " +
                            std::to_string(cursor_ + 1) + ".." + std::to_string(cursor_ + batch) +
                            " (trial " + std::to_string(trial_) + ")");
    }
    LatentMatrix out = matrix_->slice(cursor_, batch);
    cursor_ += batch;
    return out;
  }

  const Rng rng(stream_seed_);
  std::vector<double> values(batch * kLatentDim);
  const std::uint64_t base = static_cast<std::uint64_t>(cursor_) * kLatentDim;
  if (spec_.kind == SourceSpec::Kind::Uniform) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = -1.0 + 2.0 * rng.uniform01_at(base + i);
    }
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = normal_edge_transform(spec_.sigma * rng.normal_at(2 * (base + i)));
    }
  }
  cursor_ += batch;
  return LatentMatrix(std::move(values), spec_);
}

LatentSource::LatentSource(SourceSpec spec, std::shared_ptr<const TraceSet> traces)
    : spec_(spec), traces_(std::move(traces)) {
  spec_.validate();
  if (spec_.chaos_backed() && !traces_) {
    throw ConfigError("source " + spec_.label() + " needs chaos traces");
  }
}

std::shared_ptr<const LatentMatrix> LatentSource::matrix() const {
  if (!spec_.chaos_backed()) throw ConfigError("source " + spec_.label() + " has no matrix");
  if (!matrix_) {
    matrix_ = std::make_shared<const LatentMatrix>(build_matrix(spec_, traces_.get(), 0));
  }
  return matrix_;
}

LatentStream LatentSource::stream(int trial_index) const {
  if (spec_.chaos_backed()) return LatentStream(matrix(), trial_index);
  return LatentStream(spec_, trial_index);
}

void write_latent_csv(const LatentMatrix& m, std::ostream& out) {
  char buf[32];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < kLatentDim; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

LatentMatrix read_latent_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::size_t count = 0;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw FormatError("latent csv line " + std::to_string(line_no) + ": bad number '" +
                          cell + "'");
      }
      values.push_back(v);
      ++count;
    }
    if (count != kLatentDim) {
      throw FormatError("latent csv line " + std::to_string(line_no) + ": expected 100 columns");
    }
  }
  return LatentMatrix(std::move(values), SourceSpec{});
}

void write_latent_binary(const LatentMatrix& m, std::ostream& out) {
  out.write("LATM", 4);
  detail::put_u32(out, kLatentFormatVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(m.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(kLatentDim));
  for (double v : m.values()) detail::put_f64(out, v);
}

LatentMatrix read_latent_binary(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::string(magic, 4) != "LATM") {
    throw FormatError("latent binary: bad magic");
  }
  if (detail::get_u32(in, "version") != kLatentFormatVersion) {
    throw FormatError("latent binary: unsupported version");
  }
  const std::uint32_t rows = detail::get_u32(in, "rows");
  const std::uint32_t cols = detail::get_u32(in, "cols");
  if (cols != kLatentDim) throw FormatError("latent binary: expected 100 columns");
  std::vector<double> values(static_cast<std::size_t>(rows) * cols);
  for (auto& v : values) v = detail::get_f64(in, "latent values");
  return LatentMatrix(std::move(values), SourceSpec{});
}

}  // namespace chaosgan
