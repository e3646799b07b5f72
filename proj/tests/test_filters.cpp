#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fm2s/errors.hpp"
#include "fm2s/filters.hpp"
#include "fm2s/rng.hpp"

using fm2s::Image;

namespace {

Image random_image(int h, int w, int c, std::uint64_t seed) {
  fm2s::RngStream r(seed);
  Image img(h, w, c);
  for (auto& v : img.data) v = static_cast<float>(r.next_double());
  return img;
}

int clampi(int i, int n) { return std::min(std::max(i, 0), n - 1); }

// Independent median reference: full sort per window.
Image median_reference(const Image& img, int window) {
  const int r = window / 2;
  Image out(img.height, img.width, img.channels, img.source_depth);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        std::vector<float> vals;
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx)
            vals.push_back(img.at(clampi(y + dy, img.height), clampi(x + dx, img.width), c));
        std::sort(vals.begin(), vals.end());
        out.at(y, x, c) = vals[vals.size() / 2];
      }
  return out;
}

// Independent Gaussian reference: direct 2D product-kernel sum.
Image gaussian_reference(const Image& img, int window, double sigma) {
  const int r = window / 2;
  std::vector<double> k(window);
  double s = 0.0;
  for (int i = 0; i < window; ++i) {
    const double d = (i - r) / sigma;
    k[i] = std::exp(-0.5 * d * d);
    s += k[i];
  }
  for (auto& v : k) v /= s;
  Image out(img.height, img.width, img.channels, img.source_depth);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        double acc = 0.0;
        for (int i = 0; i < window; ++i)
          for (int j = 0; j < window; ++j)
            acc += k[i] * k[j] *
                   img.at(clampi(y + i - r, img.height), clampi(x + j - r, img.width), c);
        out.at(y, x, c) = static_cast<float>(acc);
      }
  return out;
}

}  // namespace

TEST_CASE("median: constant image is unchanged") {
  const Image img(8, 8, 1, fm2s::SourceDepth::bit8, 0.375f);
  const Image out = fm2s::median_filter(img, 3);
  for (float v : out.data) CHECK(v == 0.375f);
}

TEST_CASE("median: center of 1..9 grid is 5") {
  Image img(3, 3, 1);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) img.at(y, x) = (y * 3 + x + 1) / 10.0f;
  const Image out = fm2s::median_filter(img, 3);
  CHECK(out.at(1, 1) == 0.5f);
}

TEST_CASE("median: matches the brute-force reference everywhere") {
  const Image img = random_image(32, 32, 1, 21);
  const Image out = fm2s::median_filter(img, 3);
  const Image ref = median_reference(img, 3);
  for (std::size_t i = 0; i < out.data.size(); ++i) CHECK(out.data[i] == ref.data[i]);

  // wider window exercises the replicated borders harder
  const Image img2 = random_image(20, 17, 2, 22);
  const Image out2 = fm2s::median_filter(img2, 5);
  const Image ref2 = median_reference(img2, 5);
  for (std::size_t i = 0; i < out2.data.size(); ++i) CHECK(out2.data[i] == ref2.data[i]);
}

TEST_CASE("median: stays within the input range and preserves dimensions") {
  const Image img = random_image(15, 12, 1, 23);
  const Image out = fm2s::median_filter(img, 3);
  CHECK(out.same_shape(img));
  const auto [lo, hi] = std::minmax_element(img.data.begin(), img.data.end());
  for (float v : out.data) {
    CHECK(v >= *lo);
    CHECK(v <= *hi);
  }
}

TEST_CASE("median: rejects even windows and oversized windows") {
  const Image img(8, 8, 1);
  CHECK_THROWS_AS((void)fm2s::median_filter(img, 4), fm2s::InvalidArgument);
  CHECK_THROWS_AS((void)fm2s::median_filter(img, 9), fm2s::InvalidArgument);
}

TEST_CASE("gaussian: constant image is preserved (kernel sums to 1)") {
  const Image img(9, 9, 1, fm2s::SourceDepth::bit8, 0.6f);
  const Image out = fm2s::gaussian_filter(img, 3, 0.5);
  for (float v : out.data) CHECK(v == doctest::Approx(0.6f).epsilon(1e-6));
}

TEST_CASE("gaussian: impulse response peaks at the kernel center weight") {
  Image img(31, 31, 1);
  img.at(15, 15) = 1.0f;
  const int window = 5;
  const double sigma = 1.0;
  const Image out = fm2s::gaussian_filter(img, window, sigma);

  // center weight of the normalized 1-D kernel, squared for separability
  double k[5], s = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double d = (i - 2) / sigma;
    k[i] = std::exp(-0.5 * d * d);
    s += k[i];
  }
  const double peak = (k[2] / s) * (k[2] / s);
  CHECK(out.at(15, 15) == doctest::Approx(peak).epsilon(1e-6));
}

TEST_CASE("gaussian: matches the direct 2D reference") {
  const Image img = random_image(16, 14, 1, 31);
  const Image out = fm2s::gaussian_filter(img, 5, 0.9);
  const Image ref = gaussian_reference(img, 5, 0.9);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    CHECK(out.data[i] == doctest::Approx(ref.data[i]).epsilon(1e-6));
}

TEST_CASE("gaussian: approximately preserves the mean") {
  const Image img = random_image(32, 32, 1, 32);
  const Image out = fm2s::gaussian_filter(img, 3, 0.5);
  double m_in = 0.0, m_out = 0.0;
  for (float v : img.data) m_in += v;
  for (float v : out.data) m_out += v;
  m_in /= img.data.size();
  m_out /= out.data.size();
  CHECK(std::abs(m_in - m_out) < 1e-3);
}

TEST_CASE("gaussian: output range stays within input range") {
  const Image img = random_image(16, 16, 1, 33);
  const Image out = fm2s::gaussian_filter(img, 5, 1.0);
  const auto [lo, hi] = std::minmax_element(img.data.begin(), img.data.end());
  for (float v : out.data) {
    CHECK(v >= *lo - 1e-7f);
    CHECK(v <= *hi + 1e-7f);
  }
}

TEST_CASE("gaussian: rejects bad windows and sigma") {
  const Image img(8, 8, 1);
  CHECK_THROWS_AS((void)fm2s::gaussian_filter(img, 4, 1.0), fm2s::InvalidArgument);
  CHECK_THROWS_AS((void)fm2s::gaussian_filter(img, 3, 0.0), fm2s::InvalidArgument);
  CHECK_THROWS_AS((void)fm2s::gaussian_filter(img, 3, -1.0), fm2s::InvalidArgument);
}

TEST_CASE("filterspec: validation and dispatch") {
  fm2s::FilterSpec spec;
  spec.window = 4;
  CHECK_THROWS_AS(spec.validate(), fm2s::InvalidArgument);
  spec.window = 3;
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.effective_sigma() == doctest::Approx(0.5));

  const Image img = random_image(12, 12, 1, 41);
  CHECK(fm2s::apply_prefilter(img, spec).data == fm2s::median_filter(img, 3).data);
  spec.kind = fm2s::FilterSpec::Kind::gaussian;
  CHECK(fm2s::apply_prefilter(img, spec).data ==
        fm2s::gaussian_filter(img, 3, spec.effective_sigma()).data);
}
