#include "chaosgan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "chaosgan/error.hpp"

namespace chaosgan {

namespace {

AutocorrResult average(const std::vector<std::vector<double>>& per_sequence, std::size_t maxlag,
                       std::size_t total, std::size_t length, const char* axis) {
  AutocorrResult r;
  r.maxlag = maxlag;
  r.sequence_length = length;
  r.positive.assign(maxlag + 1, 0.0);
  for (const auto& acf : per_sequence) {
    if (acf.empty()) continue;
    ++r.sequences_used;
    for (std::size_t k = 0; k <= maxlag; ++k) r.positive[k] += acf[k];
  }
  r.sequences_excluded = total - r.sequences_used;
  if (r.sequences_used == 0) {
    throw MetricError(std::string("autocorrelation along ") + axis + ": every sequence is constant");
  }
  if (r.sequences_excluded > 0) {
    std::clog << "warning: autocorrelation along " << axis << ": excluded "
              << r.sequences_excluded << " constant sequence(s)\n";
  }
  for (auto& v : r.positive) v /= static_cast<double>(r.sequences_used);
  r.positive[0] = 1.0;
  return r;
}

}  // namespace

double AutocorrResult::value(long lag) const {
  const auto k = static_cast<std::size_t>(lag < 0 ? -lag : lag);
  if (k > maxlag) throw MetricError("autocorrelation: lag beyond maxlag");
  return positive[k];
}

std::size_t AutocorrResult::most_negative_lag() const {
  if (maxlag == 0) return 0;
  const auto it = std::min_element(positive.begin() + 1, positive.end());
  return static_cast<std::size_t>(it - positive.begin());
}

double AutocorrResult::max_abs_nonzero() const {
  double m = 0.0;
  for (std::size_t k = 1; k <= maxlag; ++k) m = std::max(m, std::abs(positive[k]));
  return m;
}

std::vector<double> autocorrelation(std::span<const double> x, std::size_t maxlag) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> c(n);
  double denom = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    c[t] = x[t] - mean;
    denom += c[t] * c[t];
  }
  if (!(denom > 0.0)) return {};
  std::vector<double> r(maxlag + 1, 0.0);
  r[0] = 1.0;
  for (std::size_t k = 1; k <= maxlag && k < n; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) s += c[t] * c[t + k];
    r[k] = s / denom;
  }
  return r;
}

AutocorrResult autocorr_time(const LatentMatrix& matrix, std::size_t maxlag) {
  const std::size_t rows = matrix.rows();
  if (rows < maxlag + 2) {
    throw MetricError("autocorr_time: need at least maxlag + 2 rows, got " + std::to_string(rows));
  }
  // Row-major sweep with per-column accumulators; each column is summed in
  // the same order as `autocorrelation` would sum it.
  const auto v = matrix.values();
  std::vector<double> mean(kLatentDim, 0.0);
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t i = 0; i < kLatentDim; ++i) mean[i] += v[t * kLatentDim + i];
  }
  for (auto& m : mean) m /= static_cast<double>(rows);
  std::vector<double> denom(kLatentDim, 0.0);
  std::vector<double> sums(maxlag * kLatentDim, 0.0);
  std::vector<double> centered((maxlag + 1) * kLatentDim);
  auto centered_row = [&](std::size_t t) { return centered.data() + (t % (maxlag + 1)) * kLatentDim; };
  for (std::size_t t = 0; t < rows; ++t) {
    double* c = centered_row(t);
    for (std::size_t i = 0; i < kLatentDim; ++i) {
      c[i] = v[t * kLatentDim + i] - mean[i];
      denom[i] += c[i] * c[i];
    }
    // Pairs (t - k, t) for every lag k that fits.
    for (std::size_t k = 1; k <= maxlag && k <= t; ++k) {
      const double* p = centered_row(t - k);
      double* s = sums.data() + (k - 1) * kLatentDim;
      for (std::size_t i = 0; i < kLatentDim; ++i) s[i] += p[i] * c[i];
    }
  }
  std::vector<std::vector<double>> per_column(kLatentDim);
  for (std::size_t i = 0; i < kLatentDim; ++i) {
    if (!(denom[i] > 0.0)) continue;
    auto& r = per_column[i];
    r.assign(maxlag + 1, 0.0);
    r[0] = 1.0;
    for (std::size_t k = 1; k <= maxlag; ++k) r[k] = sums[(k - 1) * kLatentDim + i] / denom[i];
  }
  return average(per_column, maxlag, kLatentDim, rows, "time");
}

AutocorrResult autocorr_space(const LatentMatrix& matrix, std::size_t maxlag) {
  if (maxlag > kLatentDim - 1) throw MetricError("autocorr_space: maxlag must be <= 99");
  if (matrix.rows() == 0) throw MetricError("autocorr_space: empty matrix");
  std::vector<std::vector<double>> per_row(matrix.rows());
  for (std::size_t t = 0; t < matrix.rows(); ++t) per_row[t] = autocorrelation(matrix.row(t), maxlag);
  return average(per_row, maxlag, matrix.rows(), kLatentDim, "space");
}

double white_noise_band(std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

HistogramResult histogram(std::span<const double> values, std::size_t bins) {
  if (bins < 2) throw MetricError("histogram: need at least 2 bins");
  HistogramResult h;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = -1.0 + 2.0 * static_cast<double>(b) / static_cast<double>(bins);
  }
  h.counts.assign(bins, 0);
  for (double v : values) {
    const double pos = (v + 1.0) / 2.0 * static_cast<double>(bins);
    auto b = pos <= 0.0 ? std::size_t{0} : static_cast<std::size_t>(pos);
    h.counts[std::min(b, bins - 1)] += 1;
  }
  h.total = values.size();
  return h;
}

std::size_t quantize_level(double v, int bits) noexcept {
  const std::size_t levels = std::size_t{1} << bits;
  const double pos = (v + 1.0) / 2.0 * static_cast<double>(levels);
  if (!(pos > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(pos), levels - 1);
}

double min_pairwise_distance(const LatentMatrix& matrix, int quantization_bits) {
  if (quantization_bits < 1 || quantization_bits > 8) {
    throw MetricError("min_pairwise_distance: quantization_bits must be in 1..8");
  }
  const std::size_t rows = matrix.rows();
  if (rows < 2) throw MetricError("min_pairwise_distance: need at least 2 rows");

  std::vector<std::uint8_t> levels(rows * kLatentDim);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    levels[i] = static_cast<std::uint8_t>(quantize_level(matrix.values()[i], quantization_bits));
  }
  std::vector<std::size_t> best(rows, std::numeric_limits<std::size_t>::max());
  for (std::size_t a = 0; a < rows; ++a) {
    const std::uint8_t* ra = levels.data() + a * kLatentDim;
    for (std::size_t b = a + 1; b < rows; ++b) {
      const std::uint8_t* rb = levels.data() + b * kLatentDim;
      std::size_t d = 0;
      for (std::size_t i = 0; i < kLatentDim; ++i) d += ra[i] != rb[i];
      best[a] = std::min(best[a], d);
      best[b] = std::min(best[b], d);
    }
  }
  double sum = 0.0;
  for (auto d : best) sum += static_cast<double>(d);
  return sum / static_cast<double>(rows);
}

void write_autocorr_csv(const AutocorrResult& r, std::ostream& out) {
  out << "lag,value\n";
  char buf[64];
  for (long k = -static_cast<long>(r.maxlag); k <= static_cast<long>(r.maxlag); ++k) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g\n", k, r.value(k));
    out << buf;
  }
}

void write_histogram_csv(const HistogramResult& h, std::ostream& out) {
  out << "bin_low,bin_high,count\n";
  char buf[96];
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu\n", h.edges[b], h.edges[b + 1], h.counts[b]);
    out << buf;
  }
}

}  // namespace chaosgan
