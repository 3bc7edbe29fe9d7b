#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace chaosgan {

/// Pixels in [-1, 1], interleaved (y, x, channel).
struct RasterImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<double> pixels;
};

/// round((v + 1) / 2 * 255), clamped to [0, 255].
std::uint8_t pixel_to_byte(double v) noexcept;

/// Binary PGM (1 channel) or PPM (3 channels).
void write_pnm(const std::filesystem::path& path, std::span<const double> pixels,
               std::size_t height, std::size_t width, std::size_t channels);
/// Reads P2/P3/P5/P6 with maxval up to 65535.
RasterImage read_pnm(const std::filesystem::path& path);

RasterImage resize_bilinear(const RasterImage& image, std::size_t height, std::size_t width);
/// 3 -> 1 uses luminance weights 0.299/0.587/0.114; 1 -> 3 replicates.
RasterImage convert_channels(const RasterImage& image, std::size_t channels);

/// Tiles `images` row by row, `columns` per row, with a one-pixel dark gutter.
void write_image_grid(const std::filesystem::path& path,
                      const std::vector<std::span<const double>>& images, std::size_t height,
                      std::size_t width, std::size_t channels, std::size_t columns);

}  // namespace chaosgan
