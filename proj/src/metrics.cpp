#include "chaosgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>

#include "chaosgan/error.hpp"
#include "chaosgan/rng.hpp"

namespace chaosgan {

namespace {

struct Plane {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<double> v;
};

Plane to_plane(const ImageView& img, double offset) {
  if (img.pixels.size() != img.height * img.width * img.channels) {
    throw ShapeError("image view: pixel count does not match dimensions");
  }
  Plane p{img.height, img.width, std::vector<double>(img.height * img.width)};
  if (img.channels == 1) {
    for (std::size_t i = 0; i < p.v.size(); ++i) p.v[i] = img.pixels[i] + offset;
  } else if (img.channels == 3) {
    for (std::size_t i = 0; i < p.v.size(); ++i) {
      p.v[i] = 0.299 * img.pixels[3 * i] + 0.587 * img.pixels[3 * i + 1] +
               0.114 * img.pixels[3 * i + 2] + offset;
    }
  } else {
    throw ShapeError("image view: channels must be 1 or 3");
  }
  return p;
}

std::vector<double> gaussian_kernel(std::size_t size, double sigma) {
  std::vector<double> k(size);
  const double centre = (static_cast<double>(size) - 1.0) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double d = static_cast<double>(i) - centre;
    k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Valid-region separable filtering of src; output is (h - n + 1) x (w - n + 1).
std::vector<double> filter_valid(const std::vector<double>& src, std::size_t h, std::size_t w,
                                 const std::vector<double>& k) {
  const std::size_t n = k.size();
  const std::size_t ow = w - n + 1;
  const std::size_t oh = h - n + 1;
  std::vector<double> tmp(h * ow);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += k[i] * src[y * w + x + i];
      tmp[y * ow + x] = s;
    }
  }
  std::vector<double> out(oh * ow);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += k[i] * tmp[(y + i) * ow + x];
      out[y * ow + x] = s;
    }
  }
  return out;
}

SsimTerms plane_terms(const Plane& a, const Plane& b, const MsSsimConfig& cfg) {
  if (a.h < cfg.window || a.w < cfg.window) {
    throw MetricError("ssim: image " + std::to_string(a.h) + "x" + std::to_string(a.w) +
                      " is smaller than the " + std::to_string(cfg.window) + "-pixel window");
  }
  const auto k = gaussian_kernel(cfg.window, cfg.window_sigma);
  std::vector<double> aa(a.v.size());
  std::vector<double> bb(a.v.size());
  std::vector<double> ab(a.v.size());
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    aa[i] = a.v[i] * a.v[i];
    bb[i] = b.v[i] * b.v[i];
    ab[i] = a.v[i] * b.v[i];
  }
  const auto mu_a = filter_valid(a.v, a.h, a.w, k);
  const auto mu_b = filter_valid(b.v, a.h, a.w, k);
  const auto e_aa = filter_valid(aa, a.h, a.w, k);
  const auto e_bb = filter_valid(bb, a.h, a.w, k);
  const auto e_ab = filter_valid(ab, a.h, a.w, k);

  const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
  const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);
  double ssim_sum = 0.0;
  double cs_sum = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double va = e_aa[i] - mu_a[i] * mu_a[i];
    const double vb = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    const double cs = (2.0 * cov + c2) / (va + vb + c2);
    const double lum = (2.0 * mu_a[i] * mu_b[i] + c1) / (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1);
    cs_sum += cs;
    ssim_sum += lum * cs;
  }
  const auto n = static_cast<double>(mu_a.size());
  return {ssim_sum / n, cs_sum / n};
}

Plane downsample(const Plane& p) {
  Plane out{p.h / 2, p.w / 2, {}};
  out.v.resize(out.h * out.w);
  for (std::size_t y = 0; y < out.h; ++y) {
    for (std::size_t x = 0; x < out.w; ++x) {
      out.v[y * out.w + x] = 0.25 * (p.v[2 * y * p.w + 2 * x] + p.v[2 * y * p.w + 2 * x + 1] +
                                     p.v[(2 * y + 1) * p.w + 2 * x] +
                                     p.v[(2 * y + 1) * p.w + 2 * x + 1]);
    }
  }
  return out;
}

void check_pair(const ImageView& a, const ImageView& b) {
  if (a.height != b.height || a.width != b.width || a.channels != b.channels) {
    throw ShapeError("ssim: image dimensions differ");
  }
}

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw MetricError("pearson: images differ in size");
  auto constant = [](std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
  };
  const bool ca = constant(a);
  const bool cb = constant(b);
  if (ca && cb) throw MetricError("pearson: both images are constant");
  if (ca || cb) return 0.0;
  const auto n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

void ProximityConfig::validate() const {
  if (references == 0 || neighbors == 0) throw ConfigError("proximity: K and L must be >= 1");
  if (fixed_prefix > kLatentDim) throw ConfigError("proximity: fixed_prefix must be <= 100");
}

std::uint64_t neighbor_stream_seed(const ProximityConfig& cfg, std::size_t k) {
  return derive_seed(derive_seed(cfg.seed, hash_label("neighbors")), k);
}

SourceSpec default_reference_source(const ProximityConfig& cfg) {
  return SourceSpec::uniform(derive_seed(cfg.seed, hash_label("references")));
}

LatentMatrix make_neighbors(std::span<const double> z_ref, const ProximityConfig& cfg,
                            std::uint64_t stream_seed) {
  cfg.validate();
  if (z_ref.size() != kLatentDim) throw ShapeError("make_neighbors: reference must have 100 elements");
  Rng rng(stream_seed);
  std::vector<double> values(cfg.neighbors * kLatentDim);
  for (std::size_t l = 0; l < cfg.neighbors; ++l) {
    double* row = values.data() + l * kLatentDim;
    std::copy(z_ref.begin(), z_ref.begin() + static_cast<std::ptrdiff_t>(cfg.fixed_prefix), row);
    for (std::size_t i = cfg.fixed_prefix; i < kLatentDim; ++i) row[i] = rng.uniform(-1.0, 1.0);
  }
  return LatentMatrix(std::move(values), SourceSpec::uniform(stream_seed));
}

ProximityResult proximity_similarity(const GanModel& model, const ProximityConfig& cfg,
                                     const LatentSource& references) {
  cfg.validate();
  LatentStream stream = references.stream(1);
  const LatentMatrix refs = stream.next_batch(cfg.references);
  const ImageBatch ref_images = generate(model, refs);

  ProximityResult result;
  result.per_reference.resize(cfg.references);
  result.cells.reserve(cfg.references * cfg.neighbors);
  double total = 0.0;
  for (std::size_t k = 0; k < cfg.references; ++k) {
    const LatentMatrix nb = make_neighbors(refs.row(k), cfg, neighbor_stream_seed(cfg, k));
    const ImageBatch nb_images = generate(model, nb);
    double row_sum = 0.0;
    for (std::size_t l = 0; l < cfg.neighbors; ++l) {
      const double r = pearson(ref_images.image(k), nb_images.image(l));
      result.cells.push_back({k, l, r});
      row_sum += r;
    }
    result.per_reference[k] = row_sum / static_cast<double>(cfg.neighbors);
    total += row_sum;
  }
  result.value = total / static_cast<double>(cfg.references * cfg.neighbors);
  return result;
}

ProximityResult proximity_similarity(const GanModel& model, const ProximityConfig& cfg) {
  return proximity_similarity(model, cfg, LatentSource(default_reference_source(cfg)));
}

SsimTerms ssim_terms(const ImageView& a, const ImageView& b, const MsSsimConfig& cfg) {
  check_pair(a, b);
  return plane_terms(to_plane(a, cfg.offset), to_plane(b, cfg.offset), cfg);
}

double ssim(const ImageView& a, const ImageView& b, const MsSsimConfig& cfg) {
  return ssim_terms(a, b, cfg).ssim;
}

std::size_t ms_ssim_scales(std::size_t height, std::size_t width, const MsSsimConfig& cfg) {
  const std::size_t side = std::min(height, width);
  if (side < cfg.window) {
    throw MetricError("ms_ssim: image " + std::to_string(height) + "x" + std::to_string(width) +
                      " is too small for one scale with window " + std::to_string(cfg.window));
  }
  const double levels =
      std::floor(std::log2(static_cast<double>(side) / static_cast<double>(cfg.window))) + 1.0;
  const auto capped = std::min<double>(levels, static_cast<double>(std::min(cfg.max_scales, cfg.weights.size())));
  return std::max<std::size_t>(1, static_cast<std::size_t>(capped));
}

double ms_ssim(const ImageView& a, const ImageView& b, const MsSsimConfig& cfg) {
  check_pair(a, b);
  const std::size_t scales = ms_ssim_scales(a.height, a.width, cfg);
  double weight_sum = 0.0;
  for (std::size_t j = 0; j < scales; ++j) weight_sum += cfg.weights[j];

  Plane pa = to_plane(a, cfg.offset);
  Plane pb = to_plane(b, cfg.offset);
  double result = 1.0;
  for (std::size_t j = 0; j < scales; ++j) {
    const SsimTerms t = plane_terms(pa, pb, cfg);
    const double w = cfg.weights[j] / weight_sum;
    const bool coarsest = j + 1 == scales;
    result *= std::pow(std::max(coarsest ? t.ssim : t.cs, 0.0), w);
    if (!coarsest) {
      pa = downsample(pa);
      pb = downsample(pb);
    }
  }
  return result;
}

void DiversityConfig::validate() const {
  if (image_count < 2) throw ConfigError("diversity: image_count must be >= 2");
  if (trials == 0) throw ConfigError("diversity: trials must be >= 1");
  if (first_trial == 0) throw ConfigError("diversity: first_trial must be >= 1");
  const std::size_t max_pairs = image_count * (image_count - 1) / 2;
  if (pair_count == 0 || pair_count > max_pairs) {
    throw ConfigError("diversity: pair_count must be in 1..image_count(image_count-1)/2");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t count,
                                                              std::uint64_t seed) {
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (count > total) throw ConfigError("sample_pairs: more pairs requested than exist");
  Rng rng(seed);
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = total - count; j < total; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  // Index -> (i, j) in row-major order over the strict upper triangle.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(count);
  std::size_t i = 0;
  std::uint64_t row_start = 0;
  for (std::uint64_t idx : chosen) {
    while (idx >= row_start + (n - 1 - i)) {
      row_start += n - 1 - i;
      ++i;
    }
    pairs.emplace_back(i, i + 1 + static_cast<std::size_t>(idx - row_start));
  }
  return pairs;
}

DiversityResult diversity(const GanModel& model, const DiversityConfig& cfg,
                          const LatentSource& retrieval, const MsSsimConfig& ssim_cfg) {
  cfg.validate();
  DiversityResult result;
  const auto& mc = model.config;
  for (std::size_t t = 1; t <= cfg.trials; ++t) {
    LatentStream stream = retrieval.stream(static_cast<int>(cfg.first_trial + t - 1));
    const ImageBatch images = generate(model, stream.next_batch(cfg.image_count));
    const std::uint64_t pair_seed =
        derive_seed(derive_seed(cfg.seed, hash_label("pairs")), cfg.first_trial + t - 1);
    const auto pairs = sample_pairs(cfg.image_count, cfg.pair_count, pair_seed);
    double sum = 0.0;
    for (const auto& [i, j] : pairs) {
      sum += ms_ssim({images.image(i), mc.image_height, mc.image_width, mc.channels},
                     {images.image(j), mc.image_height, mc.image_width, mc.channels}, ssim_cfg);
    }
    const double s = sum / static_cast<double>(pairs.size());
    result.similarity.push_back(s);
    result.per_trial.push_back(1.0 - s);
  }
  result.value = std::accumulate(result.per_trial.begin(), result.per_trial.end(), 0.0) /
                 static_cast<double>(result.per_trial.size());
  return result;
}

void write_proximity_csv(const ProximityResult& r, std::ostream& out) {
  out << "k,l,r\n";
  char buf[96];
  for (const auto& c : r.cells) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", c.k + 1, c.l + 1, c.r);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "mean,,%.17g\n", r.value);
  out << buf;
}

void write_diversity_csv(const DiversityResult& r, std::ostream& out) {
  out << "trial,similarity,diversity\n";
  char buf[96];
  for (std::size_t t = 0; t < r.per_trial.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", t + 1, r.similarity[t], r.per_trial[t]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "mean,%.17g,%.17g\n", 1.0 - r.value, r.value);
  out << buf;
}

}  // namespace chaosgan
