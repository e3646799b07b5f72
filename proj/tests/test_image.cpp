#include <doctest.h>

#include <png.h>
#include <tiffio.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "fm2s/errors.hpp"
#include "fm2s/image.hpp"
#include "fm2s/image_io.hpp"
#include "fm2s/rng.hpp"

using fm2s::Image;
using fm2s::SourceDepth;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  const fs::path d = fs::temp_directory_path() / "fm2s_image_tests";
  fs::create_directories(d);
  return d;
}

Image random_image(int h, int w, int c, SourceDepth depth, std::uint64_t seed) {
  fm2s::RngStream r(seed);
  Image img(h, w, c, depth);
  for (auto& v : img.data) v = static_cast<float>(r.next_double());
  return img;
}

// test fixture: a 4x4 RGB PNG, unsupported by the loader
void write_rgb_png(const fs::path& path) {
  FILE* fp = std::fopen(path.string().c_str(), "wb");
  REQUIRE(fp);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  REQUIRE(setjmp(png_jmpbuf(png)) == 0);
  png_init_io(png, fp);
  png_set_IHDR(png, info, 4, 4, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  unsigned char row[12] = {0};
  for (int y = 0; y < 4; ++y) png_write_row(png, row);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

// test fixture: a 4x4 float TIFF, unsupported by the loader
void write_float_tiff(const fs::path& path) {
  TIFF* tif = TIFFOpen(path.string().c_str(), "w");
  REQUIRE(tif);
  TIFFSetField(tif, TIFFTAG_IMAGEWIDTH, 4);
  TIFFSetField(tif, TIFFTAG_IMAGELENGTH, 4);
  TIFFSetField(tif, TIFFTAG_BITSPERSAMPLE, 32);
  TIFFSetField(tif, TIFFTAG_SAMPLESPERPIXEL, 1);
  TIFFSetField(tif, TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_IEEEFP);
  TIFFSetField(tif, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
  TIFFSetField(tif, TIFFTAG_ROWSPERSTRIP, 4);
  float row[4] = {0.f, 0.25f, 0.5f, 1.f};
  for (int y = 0; y < 4; ++y) TIFFWriteScanline(tif, row, y, 0);
  TIFFClose(tif);
}

}  // namespace

TEST_CASE("image: validate rejects broken invariants") {
  CHECK_NOTHROW(Image(3, 3, 1).validate());
  CHECK_THROWS_AS(Image(2, 5, 1).validate(), fm2s::InvalidArgument);
  CHECK_THROWS_AS(Image(5, 2, 1).validate(), fm2s::InvalidArgument);
  Image bad(4, 4, 1);
  bad.at(1, 1) = 1.5f;
  CHECK_THROWS_AS(bad.validate(), fm2s::InvalidArgument);
  bad.at(1, 1) = -0.1f;
  CHECK_THROWS_AS(bad.validate(), fm2s::InvalidArgument);
  Image truncated(4, 4, 1);
  truncated.data.pop_back();
  CHECK_THROWS_AS(truncated.validate(), fm2s::InvalidArgument);
}

TEST_CASE("image: channel extraction and assembly") {
  Image img(3, 3, 2);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) {
      img.at(y, x, 0) = 0.25f;
      img.at(y, x, 1) = 0.75f;
    }
  CHECK(img.channel(0).at(1, 1) == 0.25f);
  CHECK(img.channel(1).at(1, 1) == 0.75f);
  CHECK_THROWS_AS((void)img.channel(2), fm2s::InvalidArgument);

  Image plane(3, 3, 1, SourceDepth::bit8, 0.5f);
  img.set_channel(1, plane);
  CHECK(img.at(2, 2, 1) == 0.5f);
}

TEST_CASE("io: 8-bit PNG of all-max pixels loads as all 1.0") {
  const fs::path p = tmp_dir() / "white.png";
  Image img(4, 4, 1, SourceDepth::bit8, 1.0f);
  fm2s::save_image(img, p);
  const Image back = fm2s::load_image(p);
  CHECK(back.source_depth == SourceDepth::bit8);
  for (float v : back.data) CHECK(v == 1.0f);
}

TEST_CASE("io: 16-bit TIFF of all-zero pixels loads as all 0.0") {
  const fs::path p = tmp_dir() / "black.tif";
  Image img(4, 4, 1, SourceDepth::bit16, 0.0f);
  fm2s::save_image(img, p);
  const Image back = fm2s::load_image(p);
  CHECK(back.source_depth == SourceDepth::bit16);
  for (float v : back.data) CHECK(v == 0.0f);
}

TEST_CASE("io: 8-bit sample 128 normalizes to 128/255") {
  const fs::path p = tmp_dir() / "mid.png";
  Image img(4, 4, 1, SourceDepth::bit8, 128.0f / 255.0f);
  fm2s::save_image(img, p);
  const Image back = fm2s::load_image(p);
  const double expected = 128.0 / 255.0;  // = 0.50196...
  for (float v : back.data) CHECK(std::abs(v - expected) < 1e-7);
}

TEST_CASE("io: quantization rounds half away from zero (0.5 -> 128 at 8-bit)") {
  const fs::path p = tmp_dir() / "half.png";
  Image img(4, 4, 1, SourceDepth::bit8, 0.5f);  // 0.5*255 = 127.5
  fm2s::save_image(img, p);
  const Image back = fm2s::load_image(p);
  // 128/255, not 127/255: float storage leaves ~1e-8 representation slack
  for (float v : back.data) CHECK(v == doctest::Approx(128.0 / 255.0).epsilon(1e-6));
}

TEST_CASE("io: round-trip error stays within one quantum") {
  for (const SourceDepth depth : {SourceDepth::bit8, SourceDepth::bit16}) {
    const double quantum = 1.0 / fm2s::depth_max(depth);
    const fs::path p = tmp_dir() / (depth == SourceDepth::bit8 ? "rt8.png" : "rt16.tif");
    const Image img = random_image(16, 13, 1, depth, 99);
    fm2s::save_image(img, p);
    const Image back = fm2s::load_image(p);
    REQUIRE(back.same_shape(img));
    double max_err = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i)
      max_err = std::max(max_err, std::abs(double(img.data[i]) - double(back.data[i])));
    CHECK(max_err <= quantum);
    // rounding actually achieves half a quantum
    CHECK(max_err <= 0.5 * quantum + 1e-9);
  }
}

TEST_CASE("io: multi-plane TIFF stack round-trips channel per plane") {
  const fs::path p = tmp_dir() / "stack.tif";
  const Image img = random_image(8, 9, 3, SourceDepth::bit16, 7);
  fm2s::save_image(img, p);
  const Image back = fm2s::load_image(p);
  REQUIRE(back.channels == 3);
  REQUIRE(back.same_shape(img));
  for (std::size_t i = 0; i < img.data.size(); ++i)
    CHECK(std::abs(img.data[i] - back.data[i]) <= 0.5f / 65535.0f + 1e-9f);
}

TEST_CASE("io: PNG cannot hold a multi-channel stack") {
  const Image img = random_image(4, 4, 2, SourceDepth::bit8, 1);
  CHECK_THROWS_AS(fm2s::save_image(img, tmp_dir() / "stack.png"), fm2s::IoError);
}

TEST_CASE("io: missing file reports the path") {
  const std::string missing = (tmp_dir() / "does_not_exist.png").string();
  try {
    (void)fm2s::load_image(missing);
    FAIL("expected IoError");
  } catch (const fm2s::IoError& e) {
    CHECK(std::string(e.what()).find(missing) != std::string::npos);
  }
}

TEST_CASE("io: RGB PNG is rejected with the format named") {
  const fs::path p = tmp_dir() / "rgb.png";
  write_rgb_png(p);
  try {
    (void)fm2s::load_image(p);
    FAIL("expected IoError");
  } catch (const fm2s::IoError& e) {
    CHECK(std::string(e.what()).find("RGB") != std::string::npos);
  }
}

TEST_CASE("io: float TIFF is rejected with the format named") {
  const fs::path p = tmp_dir() / "float.tif";
  write_float_tiff(p);
  try {
    (void)fm2s::load_image(p);
    FAIL("expected IoError");
  } catch (const fm2s::IoError& e) {
    CHECK(std::string(e.what()).find("floating-point") != std::string::npos);
  }
}

TEST_CASE("io: unwritable path fails with IoError") {
  const Image img(4, 4, 1);
  CHECK_THROWS_AS(fm2s::save_image(img, "/nonexistent_dir_fm2s/out.png"), fm2s::IoError);
  CHECK_THROWS_AS(fm2s::save_image(img, tmp_dir() / "bad.bmp"), fm2s::IoError);
}
