#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "chaosgan/trace_io.hpp"

namespace chaosgan {

/// Width of every latent vector Z.
inline constexpr std::size_t kLatentDim = 100;
/// Row offset between successive training trials of a pre-tabulated source.
inline constexpr std::size_t kTrialRowOffset = 128;

/// Which recipe produces the latent vectors.
struct SourceSpec {
  enum class Kind {
    Uniform,
    NormalEdge,
    ChaosTime,
    ChaosSpace,
    SurrogateChaosTime,
    SurrogateChaosSpace,
  };

  Kind kind = Kind::Uniform;
  double sigma = 0.2;              // NormalEdge
  int si_ps = 10;                  // chaos kinds
  std::uint64_t shuffle_seed = 0;  // surrogate kinds
  std::uint64_t seed = 0;          // pseudorandom kinds

  static SourceSpec uniform(std::uint64_t seed);
  static SourceSpec normal_edge(double sigma, std::uint64_t seed);
  static SourceSpec chaos_time(int si_ps);
  static SourceSpec chaos_space(int si_ps);
  static SourceSpec surrogate_time(int si_ps, std::uint64_t shuffle_seed);
  static SourceSpec surrogate_space(int si_ps, std::uint64_t shuffle_seed);

  bool chaos_backed() const noexcept { return kind != Kind::Uniform && kind != Kind::NormalEdge; }
  bool surrogate() const noexcept {
    return kind == Kind::SurrogateChaosTime || kind == Kind::SurrogateChaosSpace;
  }
  bool space_domain() const noexcept {
    return kind == Kind::ChaosSpace || kind == Kind::SurrogateChaosSpace;
  }
  /// Short stable name, e.g. "rand", "randn0.2", "chaos_time_si50".
  std::string label() const;
  void validate() const;
};

/// Parses the names produced by `SourceSpec::label()` (seeds left at zero).
SourceSpec parse_source_label(const std::string& label);

/// Rows of 100-element latent vectors in generation order.
class LatentMatrix {
 public:
  LatentMatrix() = default;
  /// `values` is row-major with `kLatentDim` columns.
  LatentMatrix(std::vector<double> values, SourceSpec source);

  std::size_t rows() const noexcept { return values_.size() / kLatentDim; }
  static constexpr std::size_t cols() noexcept { return kLatentDim; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * kLatentDim, kLatentDim};
  }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * kLatentDim + c]; }
  std::span<const double> values() const noexcept { return values_; }
  const SourceSpec& source() const noexcept { return source_; }

  LatentMatrix slice(std::size_t first_row, std::size_t count) const;

  friend bool operator==(const LatentMatrix& a, const LatentMatrix& b) {
    return a.values_ == b.values_;
  }

 private:
  std::vector<double> values_;
  SourceSpec source_;
};

/// Maps four unsigned bytes (Chaos1 most significant) to u / 2^31 - 1 in [-1, 1).
constexpr double pack_u32(std::uint8_t b1, std::uint8_t b2, std::uint8_t b3,
                          std::uint8_t b4) noexcept {
  const std::uint32_t u = (std::uint32_t{b1} << 24) | (std::uint32_t{b2} << 16) |
                          (std::uint32_t{b3} << 8) | std::uint32_t{b4};
  return static_cast<double>(u) / 2147483648.0 - 1.0;
}

/// Packed scalar sequence per measurement, resampled to `si_ps`; index [measurement - 1][t].
using PackedSequences = std::vector<std::vector<double>>;

/// Requires 4 channels, >= 100 measurements and si_ps a positive multiple of the trace interval.
PackedSequences packed_sequences(const TraceSet& traces, int si_ps);

/// Row t = [P_1(t), ..., P_100(t)]; rows = shortest sequence length.
LatentMatrix arrange_time(const PackedSequences& sequences, SourceSpec source);
/// Rows are consecutive 100-sample windows of sequence 1, then sequence 2, and so on.
LatentMatrix arrange_space(const PackedSequences& sequences, SourceSpec source);

LatentMatrix build_time_domain(const TraceSet& traces, int si_ps);
LatentMatrix build_space_domain(const TraceSet& traces, int si_ps);

/// i.i.d. uniform on [-1, 1).
LatentMatrix sample_uniform(std::uint64_t seed, std::size_t rows);

/// Edge shift applied to a normal draw: g - 1 for g >= 0, g + 1 otherwise, clamped to [-1, 1].
double normal_edge_transform(double g) noexcept;
LatentMatrix sample_normal_edge(std::uint64_t seed, double sigma, std::size_t rows);

/// Seeded Fisher-Yates permutation.
std::vector<double> surrogate_shuffle(std::span<const double> sequence,
                                      std::uint64_t shuffle_seed);
/// Shuffles the concatenation of all sequences, then splits back to the original lengths.
PackedSequences surrogate_shuffle(const PackedSequences& sequences, std::uint64_t shuffle_seed);

/// Chaos-backed kinds need `traces`; pseudorandom kinds produce `rows` rows.
LatentMatrix build_matrix(const SourceSpec& spec, const TraceSet* traces, std::size_t rows);

/**
 * Single-owner cursor over a latent source.
 *
 * Matrix-backed streams start at row 128 (n - 1) for trial n and fail with
 * SourceExhausted at the end. Pseudorandom streams are unbounded; trial n
 * draws from a seed derived from (spec.seed, n).
 */
class LatentStream {
 public:
  LatentStream(std::shared_ptr<const LatentMatrix> matrix, int trial_index);
  LatentStream(const SourceSpec& pseudorandom, int trial_index);

  LatentMatrix next_batch(std::size_t batch);

  std::size_t cursor() const noexcept { return cursor_; }
  int trial_index() const noexcept { return trial_; }
  bool bounded() const noexcept { return matrix_ != nullptr; }
  /// Rows left in a bounded stream.
  std::size_t remaining() const noexcept;
  const SourceSpec& source() const noexcept { return spec_; }

 private:
  std::shared_ptr<const LatentMatrix> matrix_;
  SourceSpec spec_;
  std::uint64_t stream_seed_ = 0;
  int trial_ = 1;
  std::size_t cursor_ = 0;
};

/// A source spec bound to its data; builds the chaos matrix once and hands out per-trial streams.
class LatentSource {
 public:
  explicit LatentSource(SourceSpec spec, std::shared_ptr<const TraceSet> traces = nullptr);

  const SourceSpec& spec() const noexcept { return spec_; }
  LatentStream stream(int trial_index) const;
  /// Chaos-backed only.
  std::shared_ptr<const LatentMatrix> matrix() const;

 private:
  SourceSpec spec_;
  std::shared_ptr<const TraceSet> traces_;
  mutable std::shared_ptr<const LatentMatrix> matrix_;
};

/// One row per vector, 100 columns, 17 significant digits.
void write_latent_csv(const LatentMatrix& m, std::ostream& out);
LatentMatrix read_latent_csv(std::istream& in);
/// 16-byte header (magic "LATM", u32 version, u32 rows, u32 cols) then little-endian f64.
void write_latent_binary(const LatentMatrix& m, std::ostream& out);
LatentMatrix read_latent_binary(std::istream& in);

}  // namespace chaosgan
