#pragma once

#include <vector>

#include "fm2s/filters.hpp"
#include "fm2s/image.hpp"
#include "fm2s/rng.hpp"

namespace fm2s {

// Floor for the chunk mean when it divides the Poisson factor, so
// all-black chunks keep a finite rate.
inline constexpr double kRegionMeanFloor = 1.0 / 255.0;

// Per-region noise parameters from the chunk mean M in [0,1]. k_g is
// specified on the 8-bit intensity scale, hence the /255.
inline double region_sigma_g(double k_g, double mean) { return k_g * mean / 255.0; }
inline double region_lambda_p(double k_p, double mean) {
  return k_p / (mean > kRegionMeanFloor ? mean : kRegionMeanFloor);
}

// Injection hyperparameters for one microscope configuration.
struct NoiseConfig {
  int lambda_amp = 2;              // channel amplification factor
  int stride = 75;                 // region chunk side in pixels
  double k_g = 200.0;              // Gaussian mapping factor
  double k_p = 30.0;               // Poisson mapping factor
  double lambda_p_overall = 60.0;  // whole-image Poisson factor
  FilterSpec filter;

  void validate() const;
  bool operator==(const NoiseConfig&) const = default;
};

// Per-chunk mean intensity map. Chunks tile from the top-left; the
// rightmost/bottom chunks may be partial.
struct RegionMask {
  int chunk_rows = 0;
  int chunk_cols = 0;
  int stride = 1;
  int height = 0;  // source image size, for mismatch checks
  int width = 0;
  std::vector<double> means;  // chunk_rows * chunk_cols, each in [0,1]

  double mean_at(int cy, int cx) const {
    return means[static_cast<std::size_t>(cy) * chunk_cols + cx];
  }
  int region_of(int y, int x) const { return (y / stride) * chunk_cols + x / stride; }
};

// Output channel j copies input channel floor(j/lambda); H and W are
// unchanged.
Image amplify_channels(const Image& img, int lambda_amp);

// Chunk means computed on channel 0 (amplified channels are copies at
// this point).
RegionMask region_mask(const Image& img, int stride);

// Region-adaptive mixed Poisson-Gaussian noise: per region k,
// sigma_g[k] = k_g*M[k]/255 and lambda_p[k] = k_p/max(M[k], 1/255);
// each pixel x becomes P(lambda_p[k]*x)/lambda_p[k] + N(0, sigma_g[k]),
// clipped to [0,1]. Each channel consumes an independent derived stream.
Image inject_region_wise(const Image& img, const RegionMask& mask, double k_g, double k_p,
                         RngStream rng);

// Whole-image Poisson: each pixel x becomes P(lambda_p*x)/lambda_p,
// clipped to [0,1]. Per-channel derived streams.
Image inject_overall(const Image& img, double lambda_p, RngStream rng);

// Full injection pass: region-wise first, then overall. The image must
// already be pre-denoised (and channel-amplified when lambda_amp > 1);
// the region mask is built internally from it.
Image inject(const Image& img_filtered, const NoiseConfig& cfg, RngStream rng);

}  // namespace fm2s
