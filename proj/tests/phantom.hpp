#pragma once

// Synthetic piecewise-smooth scene used by the end-to-end tests, plus a
// test-owned mixed Poisson-Gaussian corruption.

#include <algorithm>
#include <cmath>

#include "fm2s/image.hpp"
#include "fm2s/rng.hpp"

namespace fm2s_test {

inline fm2s::Image make_phantom(int n = 256) {
  fm2s::Image img(n, n, 1, fm2s::SourceDepth::bit8);
  const double nn = n - 1;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      double v = 0.12 + 0.08 * x / nn;  // gentle background ramp

      // bright disk with a soft (cosine) rim
      {
        const double cy = 0.34 * n, cx = 0.36 * n, r = 0.18 * n;
        const double d = std::hypot(y - cy, x - cx);
        if (d < r - 3.0)
          v = 0.72;
        else if (d < r + 3.0)
          v = v + (0.72 - v) * 0.5 * (1.0 + std::cos((d - (r - 3.0)) * 3.14159265358979 / 6.0));
      }

      // flat rectangle with hard edges
      if (y >= 0.60 * n && y < 0.82 * n && x >= 0.15 * n && x < 0.45 * n) v = 0.45;

      // smooth blob
      {
        const double cy = 0.72 * n, cx = 0.74 * n, s = 0.07 * n;
        const double d2 = ((y - cy) * (y - cy) + (x - cx) * (x - cx)) / (2.0 * s * s);
        v += 0.50 * std::exp(-d2);
      }

      // linear ramp band
      if (y >= 0.10 * n && y < 0.20 * n && x >= 0.55 * n && x < 0.95 * n) {
        const double t = (x - 0.55 * n) / (0.40 * n);
        v = 0.20 + 0.65 * t;
      }

      img.at(y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return img;
}

// Mixed Poisson-Gaussian corruption with known parameters:
// x -> P(lambda x)/lambda + N(0, sigma), clipped to [0,1].
inline fm2s::Image corrupt_mpg(const fm2s::Image& clean, double lambda_p, double gauss_sigma,
                               fm2s::RngStream rng) {
  fm2s::Image out(clean.height, clean.width, clean.channels, clean.source_depth);
  for (int c = 0; c < clean.channels; ++c) {
    fm2s::RngStream ch = rng.derive(c);
    for (int y = 0; y < clean.height; ++y) {
      for (int x = 0; x < clean.width; ++x) {
        const double v = clean.at(y, x, c);
        double noisy = fm2s::sample_poisson(ch, lambda_p * v) / lambda_p;
        noisy += fm2s::sample_gaussian(ch, gauss_sigma);
        out.at(y, x, c) = static_cast<float>(std::clamp(noisy, 0.0, 1.0));
      }
    }
  }
  return out;
}

}  // namespace fm2s_test
