#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "chaosgan/gan.hpp"
#include "chaosgan/latent_source.hpp"

namespace chaosgan {

/**
 * Pearson correlation over all pixels, means removed.
 *
 * Returns 0 when exactly one image is constant; throws MetricError when both
 * are constant or the sizes differ.
 */
double pearson(std::span<const double> a, std::span<const double> b);

struct ProximityConfig {
  std::size_t references = 200;  // K
  std::size_t neighbors = 100;   // L
  std::size_t fixed_prefix = 90;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Neighbor l copies z_ref[0, fixed_prefix) and draws the rest uniformly on [-1, 1).
LatentMatrix make_neighbors(std::span<const double> z_ref, const ProximityConfig& cfg,
                            std::uint64_t stream_seed);

/// Stream seed used for the neighbors of reference k (zero-based).
std::uint64_t neighbor_stream_seed(const ProximityConfig& cfg, std::size_t k);
/// Default reference source: uniform, seeded from cfg.seed.
SourceSpec default_reference_source(const ProximityConfig& cfg);

struct ProximityCell {
  std::size_t k = 0;
  std::size_t l = 0;
  double r = 0.0;
};

struct ProximityResult {
  double value = 0.0;
  std::vector<double> per_reference;  // mean over l for each k
  std::vector<ProximityCell> cells;
};

/// (1 / KL) sum_k sum_l R(P_ref(k), P_neighbor(k, l)); references are the first K rows of trial 1.
ProximityResult proximity_similarity(const GanModel& model, const ProximityConfig& cfg,
                                     const LatentSource& references);
ProximityResult proximity_similarity(const GanModel& model, const ProximityConfig& cfg);

struct MsSsimConfig {
  std::size_t window = 11;
  double window_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 2.0;
  // Added to [-1, 1] pixels so they land on [0, dynamic_range].
  double offset = 1.0;
  std::vector<double> weights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  std::size_t max_scales = 5;
};

struct ImageView {
  std::span<const double> pixels;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
};

/// Luminance/contrast-structure means of one scale.
struct SsimTerms {
  double ssim = 0.0;
  double cs = 0.0;
};

/// Gaussian-windowed SSIM over the valid region; colour images use luminance.
double ssim(const ImageView& a, const ImageView& b, const MsSsimConfig& cfg = {});
SsimTerms ssim_terms(const ImageView& a, const ImageView& b, const MsSsimConfig& cfg = {});

/// max(1, min(max_scales, floor(log2(min(H, W) / window)) + 1)).
std::size_t ms_ssim_scales(std::size_t height, std::size_t width, const MsSsimConfig& cfg);

/**
 * Multi-scale SSIM: contrast-structure terms at the finer scales and full
 * SSIM at the coarsest, each clamped at 0 and raised to its renormalized
 * weight, with 2x2 mean downsampling between scales.
 */
double ms_ssim(const ImageView& a, const ImageView& b, const MsSsimConfig& cfg = {});

struct DiversityConfig {
  std::size_t image_count = 10000;
  std::size_t pair_count = 1000;
  std::size_t trials = 10;
  // Trial t reads retrieval.stream(first_trial + t - 1).
  std::size_t first_trial = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// `count` distinct unordered pairs (i < j) of [0, n), via Floyd's algorithm, in sorted order.
std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t count,
                                                              std::uint64_t seed);

struct DiversityResult {
  double value = 0.0;
  std::vector<double> similarity;  // S per trial
  std::vector<double> per_trial;   // 1 - S per trial
};

/// Each trial generates image_count images from its retrieval stream and averages MS-SSIM over pairs.
DiversityResult diversity(const GanModel& model, const DiversityConfig& cfg,
                          const LatentSource& retrieval, const MsSsimConfig& ssim_cfg = {});

void write_proximity_csv(const ProximityResult& r, std::ostream& out);
void write_diversity_csv(const DiversityResult& r, std::ostream& out);

}  // namespace chaosgan
