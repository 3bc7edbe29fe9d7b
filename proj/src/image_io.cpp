#include "chaosgan/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "chaosgan/error.hpp"

namespace chaosgan {

namespace {

// Next whitespace-delimited ASCII token of a PNM header, skipping '#' comments.
std::string header_token(std::istream& in, const std::string& name) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!tok.empty()) break;
    } else {
      tok.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  if (tok.empty()) throw FormatError(name + ": truncated PNM header");
  return tok;
}

std::size_t parse_size(const std::string& tok, const std::string& name) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(tok, &used);
    if (used != tok.size()) throw FormatError("");
    return v;
  } catch (const std::exception&) {
    throw FormatError(name + ": bad PNM number '" + tok + "'");
  }
}

}  // namespace

std::uint8_t pixel_to_byte(double v) noexcept {
  if (!std::isfinite(v)) return 0;
  const double s = std::round((v + 1.0) / 2.0 * 255.0);
  return static_cast<std::uint8_t>(std::clamp(s, 0.0, 255.0));
}

void write_pnm(const std::filesystem::path& path, std::span<const double> pixels,
               std::size_t height, std::size_t width, std::size_t channels) {
  if (channels != 1 && channels != 3) throw ShapeError("pnm: channels must be 1 or 3");
  if (pixels.size() != height * width * channels) throw ShapeError("pnm: pixel count mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out << (channels == 1 ? "P5" : "P6") << '\n' << width << ' ' << height << "\n255\n";
  std::vector<char> bytes(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) bytes[i] = static_cast<char>(pixel_to_byte(pixels[i]));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

RasterImage read_pnm(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(name + ": cannot open image");
  const std::string magic = header_token(in, name);
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
    throw FormatError(name + ": unsupported image format '" + magic + "'");
  }
  RasterImage img;
  img.width = parse_size(header_token(in, name), name);
  img.height = parse_size(header_token(in, name), name);
  const std::size_t maxval = parse_size(header_token(in, name), name);
  if (img.width == 0 || img.height == 0 || maxval == 0 || maxval > 65535) {
    throw FormatError(name + ": invalid PNM header");
  }
  img.channels = (magic == "P3" || magic == "P6") ? 3 : 1;
  const std::size_t n = img.width * img.height * img.channels;
  img.pixels.resize(n);
  const double scale = 2.0 / static_cast<double>(maxval);
  if (magic == "P2" || magic == "P3") {
    for (auto& p : img.pixels) {
      p = static_cast<double>(parse_size(header_token(in, name), name)) * scale - 1.0;
    }
  } else {
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(n * bpp);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw FormatError(name + ": truncated pixel data");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v = bpp == 1 ? raw[i] : (std::size_t{raw[2 * i]} << 8) | raw[2 * i + 1];
      img.pixels[i] = static_cast<double>(v) * scale - 1.0;
    }
  }
  return img;
}

RasterImage resize_bilinear(const RasterImage& image, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw ShapeError("resize: target must be non-empty");
  if (image.height == height && image.width == width) return image;
  RasterImage out{height, width, image.channels, std::vector<double>(height * width * image.channels)};
  const double sy = static_cast<double>(image.height) / static_cast<double>(height);
  const double sx = static_cast<double>(image.width) / static_cast<double>(width);
  for (std::size_t y = 0; y < height; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0,
                                 static_cast<double>(image.height - 1));
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, image.height - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0,
                                   static_cast<double>(image.width - 1));
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, image.width - 1);
      const double wx = fx - static_cast<double>(x0);
      for (std::size_t c = 0; c < image.channels; ++c) {
        auto at = [&](std::size_t yy, std::size_t xx) {
          return image.pixels[(yy * image.width + xx) * image.channels + c];
        };
        const double top = at(y0, x0) * (1 - wx) + at(y0, x1) * wx;
        const double bottom = at(y1, x0) * (1 - wx) + at(y1, x1) * wx;
        out.pixels[(y * width + x) * image.channels + c] = top * (1 - wy) + bottom * wy;
      }
    }
  }
  return out;
}

RasterImage convert_channels(const RasterImage& image, std::size_t channels) {
  if (image.channels == channels) return image;
  const std::size_t n = image.height * image.width;
  RasterImage out{image.height, image.width, channels, std::vector<double>(n * channels)};
  if (image.channels == 3 && channels == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      out.pixels[i] = 0.299 * image.pixels[3 * i] + 0.587 * image.pixels[3 * i + 1] +
                      0.114 * image.pixels[3 * i + 2];
    }
  } else if (image.channels == 1 && channels == 3) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < 3; ++c) out.pixels[3 * i + c] = image.pixels[i];
    }
  } else {
    throw ShapeError("convert_channels: only 1 <-> 3 channels supported");
  }
  return out;
}

void write_image_grid(const std::filesystem::path& path,
                      const std::vector<std::span<const double>>& images, std::size_t height,
                      std::size_t width, std::size_t channels, std::size_t columns) {
  if (images.empty() || columns == 0) throw ShapeError("image grid: nothing to write");
  const std::size_t cols = std::min(columns, images.size());
  const std::size_t rows = (images.size() + cols - 1) / cols;
  const std::size_t gh = rows * (height + 1) + 1;
  const std::size_t gw = cols * (width + 1) + 1;
  std::vector<double> grid(gh * gw * channels, -1.0);
  for (std::size_t k = 0; k < images.size(); ++k) {
    if (images[k].size() != height * width * channels) throw ShapeError("image grid: size mismatch");
    const std::size_t oy = 1 + (k / cols) * (height + 1);
    const std::size_t ox = 1 + (k % cols) * (width + 1);
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        for (std::size_t c = 0; c < channels; ++c) {
          grid[((oy + y) * gw + ox + x) * channels + c] = images[k][(y * width + x) * channels + c];
        }
      }
    }
  }
  write_pnm(path, grid, gh, gw, channels);
}

}  // namespace chaosgan
