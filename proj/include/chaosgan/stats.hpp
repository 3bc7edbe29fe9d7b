#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "chaosgan/latent_source.hpp"

namespace chaosgan {

/// Normalized autocorrelation for lags -maxlag..maxlag.
struct AutocorrResult {
  std::size_t maxlag = 0;
  std::vector<double> positive;  // index k holds lag k, k = 0..maxlag
  std::size_t sequences_used = 0;
  std::size_t sequences_excluded = 0;
  std::size_t sequence_length = 0;

  double value(long lag) const;
  /// Lag in 1..maxlag with the most negative value.
  std::size_t most_negative_lag() const;
  /// Largest |value(k)| over k in 1..maxlag.
  double max_abs_nonzero() const;
};

struct HistogramResult {
  std::vector<double> edges;  // bins + 1 values on [-1, 1]
  std::vector<std::size_t> counts;
  std::size_t total = 0;
};

/**
 * Biased, mean-removed, variance-normalized autocorrelation of one sequence:
 * r(k) = sum_{t<n-k} (x_t - m)(x_{t+k} - m) / sum_t (x_t - m)^2.
 * Returns an empty vector for a constant sequence.
 */
std::vector<double> autocorrelation(std::span<const double> x, std::size_t maxlag);

/// Per-column autocorrelation over the row index t, averaged over the 100 columns.
AutocorrResult autocorr_time(const LatentMatrix& matrix, std::size_t maxlag = 50);
/// Per-row autocorrelation over the element index i, averaged over rows.
AutocorrResult autocorr_space(const LatentMatrix& matrix, std::size_t maxlag = 50);

/// +-1/sqrt(n) white-noise band for one sequence of length n.
double white_noise_band(std::size_t n);

/// Equal-width bins over [-1, 1]; the last bin is closed on the right.
HistogramResult histogram(std::span<const double> values, std::size_t bins);
inline HistogramResult histogram(const LatentMatrix& m, std::size_t bins) {
  return histogram(m.values(), bins);
}

/// Bin index of v among 2^bits equal bins over [-1, 1].
std::size_t quantize_level(double v, int bits) noexcept;

/**
 * Average over rows of the minimum Hamming distance to any other row, where
 * the distance counts positions whose quantized level differs.
 */
double min_pairwise_distance(const LatentMatrix& matrix, int quantization_bits);

void write_autocorr_csv(const AutocorrResult& r, std::ostream& out);
void write_histogram_csv(const HistogramResult& h, std::ostream& out);

}  // namespace chaosgan
