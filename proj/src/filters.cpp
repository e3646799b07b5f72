#include "fm2s/filters.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fm2s/errors.hpp"

namespace fm2s {
namespace {

void check_window(const Image& img, int window, const char* op) {
  if (window < 1 || window % 2 == 0)
    throw InvalidArgument(std::string(op) + ": window must be odd and positive, got " +
                          std::to_string(window));
  if (window > img.height || window > img.width)
    throw InvalidArgument(std::string(op) + ": window " + std::to_string(window) +
                          " larger than image " + std::to_string(img.height) + "x" +
                          std::to_string(img.width));
}

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

}  // namespace

void FilterSpec::validate() const {
  if (window < 3 || window % 2 == 0)
    throw InvalidArgument("FilterSpec: window must be odd and >= 3, got " +
                          std::to_string(window));
  if (kind == Kind::gaussian && gaussian_sigma < 0.0)
    throw InvalidArgument("FilterSpec: gaussian_sigma must be nonnegative");
}

Image median_filter(const Image& img, int window) {
  check_window(img, window, "median_filter");
  const int r = window / 2;
  Image out(img.height, img.width, img.channels, img.source_depth);
  std::vector<float> buf(static_cast<std::size_t>(window) * window);

  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        std::size_t n = 0;
        for (int dy = -r; dy <= r; ++dy) {
          const int yy = clamp_index(y + dy, img.height);
          for (int dx = -r; dx <= r; ++dx)
            buf[n++] = img.at(yy, clamp_index(x + dx, img.width), c);
        }
        auto mid = buf.begin() + n / 2;
        std::nth_element(buf.begin(), mid, buf.begin() + n);
        out.at(y, x, c) = *mid;
      }
    }
  }
  return out;
}

Image gaussian_filter(const Image& img, int window, double sigma) {
  check_window(img, window, "gaussian_filter");
  if (!(sigma > 0.0))
    throw InvalidArgument("gaussian_filter: sigma must be positive, got " +
                          std::to_string(sigma));

  const int r = window / 2;
  std::vector<double> kernel(window);
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    const double d = (i - r) / sigma;
    kernel[i] = std::exp(-0.5 * d * d);
    sum += kernel[i];
  }
  for (auto& k : kernel) k /= sum;

  Image out(img.height, img.width, img.channels, img.source_depth);
  std::vector<double> tmp(static_cast<std::size_t>(img.height) * img.width);

  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        double s = 0.0;
        for (int i = 0; i < window; ++i)
          s += kernel[i] * img.at(y, clamp_index(x + i - r, img.width), c);
        tmp[static_cast<std::size_t>(y) * img.width + x] = s;
      }
    }
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        double s = 0.0;
        for (int i = 0; i < window; ++i)
          s += kernel[i] * tmp[static_cast<std::size_t>(clamp_index(y + i - r, img.height)) * img.width + x];
        out.at(y, x, c) = static_cast<float>(s);
      }
    }
  }
  return out;
}

Image apply_prefilter(const Image& img, const FilterSpec& spec) {
  spec.validate();
  if (spec.kind == FilterSpec::Kind::median) return median_filter(img, spec.window);
  return gaussian_filter(img, spec.window, spec.effective_sigma());
}

}  // namespace fm2s
