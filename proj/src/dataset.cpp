#include "chaosgan/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "chaosgan/error.hpp"
#include "chaosgan/image_io.hpp"
#include "chaosgan/rng.hpp"

namespace chaosgan {

namespace {

constexpr int kSupersample = 4;

struct Ellipse {
  double cx, cy, ax, by, cos_t, sin_t;

  bool contains(double x, double y) const {
    const double dx = x - cx;
    const double dy = y - cy;
    const double u = (dx * cos_t + dy * sin_t) / ax;
    const double v = (-dx * sin_t + dy * cos_t) / by;
    return u * u + v * v <= 1.0;
  }
};

// Fraction of the pixel's 4x4 subsamples covered by the ellipse.
double coverage(const Ellipse& e, std::size_t px, std::size_t py) {
  int hits = 0;
  for (int sy = 0; sy < kSupersample; ++sy) {
    for (int sx = 0; sx < kSupersample; ++sx) {
      const double x = static_cast<double>(px) + (sx + 0.5) / kSupersample;
      const double y = static_cast<double>(py) + (sy + 0.5) / kSupersample;
      hits += e.contains(x, y);
    }
  }
  return static_cast<double>(hits) / (kSupersample * kSupersample);
}

void render_blob_face(Rng& rng, std::size_t h, std::size_t w, std::size_t channels,
                      double* out) {
  const double W = static_cast<double>(w);
  const double H = static_cast<double>(h);
  const double theta = rng.uniform(-0.5, 0.5);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Ellipse face{rng.uniform(0.4, 0.6) * W, rng.uniform(0.4, 0.6) * H,
                     rng.uniform(0.22, 0.34) * W, rng.uniform(0.28, 0.40) * H, c, s};
  const double face_level = rng.uniform(0.1, 0.9);
  const double eye_level = rng.uniform(-0.9, -0.5);
  const double eye_r = std::max(0.6, 0.14 * face.ax);

  // Eyes sit above the centre along the rotated axes.
  const double ex = 0.42 * face.ax;
  const double ey = -0.28 * face.by;
  const Ellipse left{face.cx + (-ex) * c - ey * s, face.cy + (-ex) * s + ey * c, eye_r, eye_r, 1, 0};
  const Ellipse right{face.cx + ex * c - ey * s, face.cy + ex * s + ey * c, eye_r, eye_r, 1, 0};

  double tint[3] = {1.0, 1.0, 1.0};
  if (channels == 3) {
    for (auto& t : tint) t = rng.uniform(0.7, 1.0);
  }
  constexpr double background = -1.0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double f = coverage(face, x, y);
      const double eyes = std::min(1.0, coverage(left, x, y) + coverage(right, x, y));
      for (std::size_t ch = 0; ch < channels; ++ch) {
        const double lit = face_level * tint[ch];
        double v = background + f * (lit - background);
        v += eyes * f * (eye_level - v);
        out[(y * w + x) * channels + ch] = std::clamp(v, -1.0, 1.0);
      }
    }
  }
}

}  // namespace

ImageDataset::ImageDataset(std::size_t height, std::size_t width, std::size_t channels,
                           std::vector<double> pixels)
    : height_(height), width_(width), channels_(channels), pixels_(std::move(pixels)) {
  const std::size_t per = height_ * width_ * channels_;
  if (per == 0 || pixels_.size() % per != 0) {
    throw ShapeError("dataset: pixel buffer is not a whole number of images");
  }
  count_ = pixels_.size() / per;
}

std::span<const double> ImageDataset::image(std::size_t index) const {
  if (index >= count_) throw ShapeError("dataset: image index out of range");
  const std::size_t per = pixels_per_image();
  return {pixels_.data() + index * per, per};
}

Matrix ImageDataset::gather(std::span<const std::size_t> indices) const {
  const std::size_t per = pixels_per_image();
  Matrix m(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(per));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto img = image(indices[r]);
    std::copy(img.begin(), img.end(), m.data() + r * per);
  }
  return m;
}

double ImageDataset::mean_pixel() const {
  double s = 0.0;
  for (double v : pixels_) s += v;
  return s / static_cast<double>(pixels_.size());
}

ImageDataset synthetic_dataset(const DatasetSpec& spec) {
  if (spec.count == 0) throw ConfigError("synthetic dataset: count must be positive");
  if (spec.height < 4 || spec.width < 4) throw ConfigError("synthetic dataset: images must be at least 4x4");
  if (spec.channels != 1 && spec.channels != 3) throw ConfigError("synthetic dataset: channels must be 1 or 3");
  const std::size_t per = spec.height * spec.width * spec.channels;
  std::vector<double> pixels(spec.count * per);
  for (std::size_t i = 0; i < spec.count; ++i) {
    Rng rng(derive_seed(spec.seed, i));
    render_blob_face(rng, spec.height, spec.width, spec.channels, pixels.data() + i * per);
  }
  return ImageDataset(spec.height, spec.width, spec.channels, std::move(pixels));
}

ImageDataset load_image_directory(const DatasetSpec& spec) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(spec.directory, ec)) {
    throw ConfigError("image directory " + spec.directory.string() + " does not exist");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(spec.directory)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm" || ext == ".pnm")) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw ConfigError("image directory " + spec.directory.string() + " has no .pgm/.ppm files");
  }
  std::sort(files.begin(), files.end());
  std::vector<double> pixels;
  for (const auto& f : files) {
    RasterImage img = convert_channels(resize_bilinear(read_pnm(f), spec.height, spec.width),
                                       spec.channels);
    pixels.insert(pixels.end(), img.pixels.begin(), img.pixels.end());
  }
  return ImageDataset(spec.height, spec.width, spec.channels, std::move(pixels));
}

ImageDataset make_dataset(const DatasetSpec& spec) {
  return spec.kind == DatasetSpec::Kind::SyntheticBlobs ? synthetic_dataset(spec)
                                                        : load_image_directory(spec);
}

}  // namespace chaosgan
