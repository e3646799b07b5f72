#include <doctest.h>

#include <cmath>
#include <vector>

#include "fm2s/errors.hpp"
#include "fm2s/metrics.hpp"
#include "fm2s/noise.hpp"

using fm2s::Image;
using fm2s::RngStream;

namespace {

Image constant_image(int h, int w, int c, float v) {
  return Image(h, w, c, fm2s::SourceDepth::bit8, v);
}

}  // namespace

TEST_CASE("amplify: lambda 1 is the identity") {
  Image img = constant_image(4, 4, 2, 0.3f);
  img.at(0, 0, 1) = 0.9f;
  const Image out = fm2s::amplify_channels(img, 1);
  CHECK(out.data == img.data);
  CHECK(out.channels == 2);
}

TEST_CASE("amplify: one channel doubles into two identical channels") {
  Image img = constant_image(3, 3, 1, 0.0f);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) img.at(y, x) = (y * 3 + x) / 10.0f;
  const Image out = fm2s::amplify_channels(img, 2);
  REQUIRE(out.channels == 2);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) {
      CHECK(out.at(y, x, 0) == img.at(y, x));
      CHECK(out.at(y, x, 1) == img.at(y, x));
    }
}

TEST_CASE("amplify: three channels at lambda 2 order as c0,c0,c1,c1,c2,c2") {
  Image img = constant_image(3, 3, 3, 0.0f);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) img.at(y, x, c) = 0.1f * (c + 1);
  const Image out = fm2s::amplify_channels(img, 2);
  REQUIRE(out.channels == 6);
  for (int j = 0; j < 6; ++j) CHECK(out.at(1, 1, j) == img.at(1, 1, j / 2));
}

TEST_CASE("region mask: constant image gives constant means") {
  const Image img = constant_image(10, 10, 1, 0.42f);
  const auto mask = fm2s::region_mask(img, 3);
  CHECK(mask.chunk_rows == 4);
  CHECK(mask.chunk_cols == 4);
  for (double m : mask.means) CHECK(m == doctest::Approx(0.42).epsilon(1e-6));
}

TEST_CASE("region mask: 4x4 image, stride 2, bright top-left quadrant") {
  Image img = constant_image(4, 4, 1, 0.0f);
  img.at(0, 0) = img.at(0, 1) = img.at(1, 0) = img.at(1, 1) = 1.0f;
  const auto mask = fm2s::region_mask(img, 2);
  REQUIRE(mask.means.size() == 4);
  CHECK(mask.means[0] == 1.0);
  CHECK(mask.means[1] == 0.0);
  CHECK(mask.means[2] == 0.0);
  CHECK(mask.means[3] == 0.0);
}

TEST_CASE("region mask: computed on channel 0 only") {
  Image img(8, 8, 2);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      img.at(y, x, 0) = 0.25f;
      img.at(y, x, 1) = 0.75f;  // must not influence the mask
    }
  const auto mask = fm2s::region_mask(img, 4);
  for (double m : mask.means) CHECK(m == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("region mask: 512x512 at stride 75 -> 7x7 chunks with 62-pixel edges") {
  RngStream r(5150);
  Image img(512, 512, 1);
  for (auto& v : img.data) v = static_cast<float>(r.next_double());
  const auto mask = fm2s::region_mask(img, 75);
  CHECK(mask.chunk_rows == 7);
  CHECK(mask.chunk_cols == 7);
  CHECK(mask.means.size() == 49);
  CHECK(512 - 6 * 75 == 62);

  // brute-force reference: accumulate each pixel into its chunk
  std::vector<double> sum(49, 0.0);
  std::vector<int> count(49, 0);
  for (int y = 0; y < 512; ++y)
    for (int x = 0; x < 512; ++x) {
      const int k = (y / 75) * 7 + (x / 75);
      sum[k] += img.at(y, x);
      ++count[k];
    }
  CHECK(count[48] == 62 * 62);
  for (int k = 0; k < 49; ++k) CHECK(mask.means[k] == doctest::Approx(sum[k] / count[k]).epsilon(1e-12));
}

TEST_CASE("region mappings: sigma grows and lambda shrinks with brightness") {
  CHECK(fm2s::region_sigma_g(200.0, 0.8) > fm2s::region_sigma_g(200.0, 0.2));
  CHECK(fm2s::region_lambda_p(30.0, 0.8) < fm2s::region_lambda_p(30.0, 0.2));
  // the documented example: k_p = 30, M = 0.5 -> lambda 60
  CHECK(fm2s::region_lambda_p(30.0, 0.5) == doctest::Approx(60.0));
  // all-black chunks are floored, not divided by zero
  CHECK(fm2s::region_lambda_p(30.0, 0.0) == doctest::Approx(30.0 * 255.0));

  // strict monotonicity over random mean pairs at and above the floor:
  // brighter regions always get more Gaussian and relatively more
  // Poisson corruption
  RngStream r(4242);
  for (int i = 0; i < 500; ++i) {
    const double lo = fm2s::kRegionMeanFloor;
    double m1 = lo + (1.0 - lo) * r.next_double();
    double m2 = lo + (1.0 - lo) * r.next_double();
    if (m1 == m2) continue;
    if (m1 < m2) std::swap(m1, m2);  // m1 brighter
    const double k_g = 1.0 + 300.0 * r.next_double();
    const double k_p = 1.0 + 100.0 * r.next_double();
    CHECK(fm2s::region_sigma_g(k_g, m1) > fm2s::region_sigma_g(k_g, m2));
    CHECK(fm2s::region_lambda_p(k_p, m1) < fm2s::region_lambda_p(k_p, m2));
  }
}

TEST_CASE("inject region-wise: vanishing-noise limit returns the input") {
  const Image img = constant_image(32, 32, 1, 0.5f);
  const auto mask = fm2s::region_mask(img, 75);
  const Image out = fm2s::inject_region_wise(img, mask, 0.0, 1e9, RngStream(3));
  for (std::size_t i = 0; i < img.data.size(); ++i)
    CHECK(std::abs(out.data[i] - img.data[i]) <= 1e-3f);
}

TEST_CASE("inject region-wise: zero pixels get no Poisson noise") {
  // region holding one bright pixel so its mean is 1/255: zero pixels
  // see Poisson(0) = 0 plus tiny Gaussian noise only
  Image img = constant_image(16, 16, 1, 0.0f);
  img.at(0, 0) = 1.0f;  // 1/(16*16) = 1/256 mean, floored to 1/255
  const auto mask = fm2s::region_mask(img, 16);
  REQUIRE(mask.means.size() == 1);

  // with k_g = 0 the zero pixels are exactly zero: deterministic Poisson(0)
  const Image no_gauss = fm2s::inject_region_wise(img, mask, 0.0, 30.0, RngStream(4));
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      if (!(y == 0 && x == 0)) CHECK(no_gauss.at(y, x) == 0.0f);

  // with k_g > 0 they carry clipped Gaussian-only noise at sigma_g scale
  const double sigma = fm2s::region_sigma_g(2550.0, mask.means[0]);
  const Image gauss = fm2s::inject_region_wise(img, mask, 2550.0, 30.0, RngStream(4));
  int positive = 0;
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      if (y == 0 && x == 0) continue;
      const float v = gauss.at(y, x);
      CHECK(v >= 0.0f);
      CHECK(v <= static_cast<float>(6.0 * sigma));
      if (v > 0.0f) ++positive;
    }
  CHECK(positive > 50);  // roughly half of 255 pixels
}

TEST_CASE("inject region-wise: Poisson term variance matches x/lambda") {
  // constant 0.5 in a single region, k_p = 30 -> lambda = 60,
  // Var(P(lambda x)/lambda) = x/lambda = 0.5/60
  const Image img = constant_image(320, 320, 1, 0.5f);
  const auto mask = fm2s::region_mask(img, 320);
  REQUIRE(mask.means.size() == 1);
  CHECK(mask.means[0] == doctest::Approx(0.5).epsilon(1e-7));
  const Image out = fm2s::inject_region_wise(img, mask, 0.0, 30.0, RngStream(6));

  double sum = 0.0, sum2 = 0.0;
  for (float v : out.data) {
    sum += v;
    sum2 += double(v) * v;
  }
  const double n = static_cast<double>(out.data.size());
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double expected = 0.5 / 60.0;  // 0.008333...
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("inject region-wise: mask mismatch is rejected") {
  const Image img = constant_image(16, 16, 1, 0.5f);
  const auto mask = fm2s::region_mask(constant_image(8, 8, 1, 0.5f), 4);
  CHECK_THROWS_AS((void)fm2s::inject_region_wise(img, mask, 1.0, 1.0, RngStream(0)),
                  fm2s::InvalidArgument);
}

TEST_CASE("inject overall: all-zero image stays zero") {
  const Image img = constant_image(16, 16, 1, 0.0f);
  const Image out = fm2s::inject_overall(img, 60.0, RngStream(7));
  for (float v : out.data) CHECK(v == 0.0f);
}

TEST_CASE("inject overall: Poisson moments at lambda 60 on constant 0.5") {
  const Image img = constant_image(320, 320, 1, 0.5f);
  const Image out = fm2s::inject_overall(img, 60.0, RngStream(8));
  double sum = 0.0, sum2 = 0.0;
  for (float v : out.data) {
    sum += v;
    sum2 += double(v) * v;
  }
  const double n = static_cast<double>(out.data.size());
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(0.5 / 60.0).epsilon(0.05));
}

TEST_CASE("inject overall: vanishing limit and bad lambda") {
  const Image img = constant_image(16, 16, 1, 0.37f);
  const Image out = fm2s::inject_overall(img, 1e9, RngStream(9));
  for (std::size_t i = 0; i < img.data.size(); ++i)
    CHECK(std::abs(out.data[i] - img.data[i]) <= 1e-3f);
  CHECK_THROWS_AS((void)fm2s::inject_overall(img, 0.0, RngStream(0)), fm2s::InvalidArgument);
}

TEST_CASE("inject: composed vanishing limits give the identity") {
  fm2s::NoiseConfig cfg;
  cfg.k_g = 0.0;
  cfg.k_p = 1e9;
  cfg.lambda_p_overall = 1e9;
  const Image img = constant_image(32, 32, 1, 0.5f);
  const Image out = fm2s::inject(img, cfg, RngStream(10));
  for (std::size_t i = 0; i < img.data.size(); ++i)
    CHECK(std::abs(out.data[i] - img.data[i]) <= 1e-3f);
}

TEST_CASE("inject: confocal_avg1 settings produce real noise on mid-gray") {
  fm2s::NoiseConfig cfg;  // Confocal avg1: k_g 200, k_p 30, lambda_p 70
  cfg.k_g = 200.0;
  cfg.k_p = 30.0;
  cfg.lambda_p_overall = 70.0;
  const Image img = constant_image(128, 128, 1, 0.5f);
  const Image out = fm2s::inject(img, cfg, RngStream(11));
  CHECK(out.data != img.data);
  const double p = fm2s::psnr(out, img);
  CHECK(std::isfinite(p));
  for (float v : out.data) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}

TEST_CASE("inject: identical seeds give bit-identical outputs") {
  fm2s::NoiseConfig cfg;
  const Image img = constant_image(32, 32, 2, 0.4f);
  const Image a = fm2s::inject(img, cfg, RngStream(12, 3));
  const Image b = fm2s::inject(img, cfg, RngStream(12, 3));
  CHECK(a.data == b.data);
  const Image c = fm2s::inject(img, cfg, RngStream(12, 4));
  CHECK(a.data != c.data);
}

TEST_CASE("inject: channels draw independent noise") {
  const Image img = constant_image(32, 32, 2, 0.5f);  // identical planes
  fm2s::NoiseConfig cfg;
  const Image out = fm2s::inject(img, cfg, RngStream(13));
  bool differs = false;
  for (int y = 0; y < 32 && !differs; ++y)
    for (int x = 0; x < 32 && !differs; ++x)
      if (out.at(y, x, 0) != out.at(y, x, 1)) differs = true;
  CHECK(differs);
}

TEST_CASE("noise config: validation") {
  fm2s::NoiseConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.lambda_amp = 0;
  CHECK_THROWS_AS(cfg.validate(), fm2s::InvalidArgument);
  cfg.lambda_amp = 1;
  cfg.k_p = 0.0;
  CHECK_THROWS_AS(cfg.validate(), fm2s::InvalidArgument);
  cfg.k_p = 30.0;
  cfg.stride = 0;
  CHECK_THROWS_AS(cfg.validate(), fm2s::InvalidArgument);
}
