#pragma once

#include "fm2s/image.hpp"

namespace fm2s {

struct QualityReport {
  double psnr = 0.0;  // decibels; +inf when the images are identical
  double ssim = 0.0;  // in [-1, 1]; exactly 1 against itself
};

// 10*log10(1/MSE) in the normalized [0,1] domain (peak 1.0). Identical
// images return +infinity. Single-channel inputs of equal size.
double psnr(const Image& a, const Image& b);

// Single-scale SSIM: 11x11 Gaussian window sigma 1.5, K1=0.01, K2=0.03,
// dynamic range 1.0, averaged over positions where the full window fits.
// Single-channel inputs; min dimension must be >= 11.
double ssim(const Image& a, const Image& b);

// Both metrics; multi-channel images are compared per channel and the
// metric values averaged.
QualityReport compare(const Image& a, const Image& b);

}  // namespace fm2s
