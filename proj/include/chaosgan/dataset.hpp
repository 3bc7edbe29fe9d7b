#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "chaosgan/tensor.hpp"

namespace chaosgan {

/// In-memory image collection, pixels in [-1, 1], interleaved (y, x, channel) per image.
class ImageDataset {
 public:
  ImageDataset(std::size_t height, std::size_t width, std::size_t channels,
               std::vector<double> pixels);

  std::size_t size() const noexcept { return count_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixels_per_image() const noexcept { return height_ * width_ * channels_; }

  std::span<const double> image(std::size_t index) const;
  /// One image per row, in the order of `indices`.
  Matrix gather(std::span<const std::size_t> indices) const;
  double mean_pixel() const;

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t channels_;
  std::size_t count_;
  std::vector<double> pixels_;
};

struct DatasetSpec {
  enum class Kind { SyntheticBlobs, ImageDirectory };

  Kind kind = Kind::SyntheticBlobs;
  std::uint64_t seed = 0;
  std::size_t count = 2048;  // synthetic only
  std::size_t height = 16;
  std::size_t width = 16;
  std::size_t channels = 1;
  std::filesystem::path directory;  // ImageDirectory only
};

/// "Blob faces": an anti-aliased ellipse with two dark dots, randomized per image.
ImageDataset synthetic_dataset(const DatasetSpec& spec);
/// Loads every .pgm/.ppm file (sorted by name) and resizes it to the spec's target.
ImageDataset load_image_directory(const DatasetSpec& spec);
ImageDataset make_dataset(const DatasetSpec& spec);

}  // namespace chaosgan
