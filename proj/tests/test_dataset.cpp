#include <filesystem>

#include "chaosgan/dataset.hpp"
#include "chaosgan/error.hpp"
#include "chaosgan/image_io.hpp"
#include "doctest.h"

using namespace chaosgan;
namespace fs = std::filesystem;

TEST_CASE("synthetic blobs are deterministic and in range") {
  DatasetSpec s;
  s.count = 16;
  const ImageDataset a = synthetic_dataset(s);
  const ImageDataset b = synthetic_dataset(s);
  CHECK(a.size() == 16);
  CHECK(a.pixels_per_image() == 256);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto x = a.image(i);
    const auto y = b.image(i);
    CHECK(std::equal(x.begin(), x.end(), y.begin()));
    for (double v : x) {
      REQUIRE(v >= -1.0);
      REQUIRE(v <= 1.0);
    }
  }
  s.seed = 1;
  const ImageDataset c = synthetic_dataset(s);
  const auto p = a.image(0);
  const auto q = c.image(0);
  CHECK_FALSE(std::equal(p.begin(), p.end(), q.begin()));
}

TEST_CASE("blob faces have background, face and eyes") {
  DatasetSpec s;
  s.count = 4;
  s.height = 32;
  s.width = 32;
  const ImageDataset d = synthetic_dataset(s);
  const auto img = d.image(0);
  CHECK(img[0] == -1.0);  // corner is background
  double brightest = -1.0;
  for (double v : img) brightest = std::max(brightest, v);
  CHECK(brightest > 0.0);
}

TEST_CASE("gather stacks images in index order") {
  DatasetSpec s;
  s.count = 5;
  s.channels = 3;
  s.height = 8;
  s.width = 8;
  const ImageDataset d = synthetic_dataset(s);
  const std::vector<std::size_t> idx{3, 0, 3};
  const Matrix m = d.gather(idx);
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 192);
  CHECK(m(0, 17) == d.image(3)[17]);
  CHECK(m(1, 5) == d.image(0)[5]);
  CHECK_THROWS(d.image(5));
}

TEST_CASE("PNM round-trip and directory loading") {
  const fs::path dir = fs::temp_directory_path() / "chaosgan_test_pnm";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<double> px{-1.0, 0.0, 1.0, 0.5};
  write_pnm(dir / "b.pgm", px, 2, 2, 1);
  const RasterImage r = read_pnm(dir / "b.pgm");
  CHECK(r.height == 2);
  CHECK(r.channels == 1);
  CHECK(pixel_to_byte(r.pixels[1]) == pixel_to_byte(0.0));
  CHECK(r.pixels[0] == -1.0);
  CHECK(r.pixels[2] == 1.0);
  CHECK(pixel_to_byte(0.0) == 128);
  CHECK(pixel_to_byte(-2.0) == 0);
  CHECK(pixel_to_byte(2.0) == 255);

  std::vector<double> rgb(2 * 2 * 3, 1.0);
  write_pnm(dir / "a.ppm", rgb, 2, 2, 3);
  DatasetSpec s;
  s.kind = DatasetSpec::Kind::ImageDirectory;
  s.directory = dir;
  s.height = 4;
  s.width = 4;
  const ImageDataset d = make_dataset(s);
  CHECK(d.size() == 2);
  CHECK(d.image(0)[0] == doctest::Approx(1.0));  // a.ppm is white

  const RasterImage grey = convert_channels(read_pnm(dir / "a.ppm"), 1);
  CHECK(grey.channels == 1);
  CHECK(grey.pixels[0] == doctest::Approx(1.0));

  DatasetSpec empty;
  empty.kind = DatasetSpec::Kind::ImageDirectory;
  empty.directory = dir / "missing";
  CHECK_THROWS(make_dataset(empty));
}
