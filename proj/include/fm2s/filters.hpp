#pragma once

#include "fm2s/image.hpp"

namespace fm2s {

// Pre-denoise filter choice. Window must be odd and fit in the image;
// sigma <= 0 picks window/6 so +-3 sigma spans the window.
struct FilterSpec {
  enum class Kind { median, gaussian };
  Kind kind = Kind::median;
  int window = 3;
  double gaussian_sigma = 0.0;

  double effective_sigma() const { return gaussian_sigma > 0.0 ? gaussian_sigma : window / 6.0; }
  void validate() const;
  bool operator==(const FilterSpec&) const = default;
};

// window x window median per pixel, edge replication at borders,
// applied independently per channel.
Image median_filter(const Image& img, int window);

// Separable Gaussian convolution, kernel renormalized to sum 1, edge
// replication at borders.
Image gaussian_filter(const Image& img, int window, double sigma);

Image apply_prefilter(const Image& img, const FilterSpec& spec);

}  // namespace fm2s
