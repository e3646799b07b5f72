#include "fm2s/noise.hpp"

#include <algorithm>
#include <string>

#include "fm2s/errors.hpp"

namespace fm2s {

void NoiseConfig::validate() const {
  if (lambda_amp < 1) throw InvalidArgument("NoiseConfig: lambda_amp must be >= 1");
  if (stride < 1) throw InvalidArgument("NoiseConfig: stride must be >= 1");
  if (k_g < 0.0) throw InvalidArgument("NoiseConfig: k_g must be nonnegative");
  if (!(k_p > 0.0)) throw InvalidArgument("NoiseConfig: k_p must be positive");
  if (!(lambda_p_overall > 0.0))
    throw InvalidArgument("NoiseConfig: lambda_p must be positive");
  filter.validate();
}

Image amplify_channels(const Image& img, int lambda_amp) {
  if (lambda_amp < 1) throw InvalidArgument("amplify_channels: lambda_amp must be >= 1");
  if (lambda_amp == 1) return img;
  Image out(img.height, img.width, img.channels * lambda_amp, img.source_depth);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int j = 0; j < out.channels; ++j) out.at(y, x, j) = img.at(y, x, j / lambda_amp);
  return out;
}

RegionMask region_mask(const Image& img, int stride) {
  if (stride < 1) throw InvalidArgument("region_mask: stride must be >= 1");
  RegionMask mask;
  mask.stride = stride;
  mask.height = img.height;
  mask.width = img.width;
  mask.chunk_rows = (img.height + stride - 1) / stride;
  mask.chunk_cols = (img.width + stride - 1) / stride;
  mask.means.assign(static_cast<std::size_t>(mask.chunk_rows) * mask.chunk_cols, 0.0);

  for (int cy = 0; cy < mask.chunk_rows; ++cy) {
    const int y0 = cy * stride;
    const int y1 = std::min(y0 + stride, img.height);
    for (int cx = 0; cx < mask.chunk_cols; ++cx) {
      const int x0 = cx * stride;
      const int x1 = std::min(x0 + stride, img.width);
      double sum = 0.0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) sum += img.at(y, x, 0);
      mask.means[static_cast<std::size_t>(cy) * mask.chunk_cols + cx] =
          sum / (static_cast<double>(y1 - y0) * (x1 - x0));
    }
  }
  return mask;
}

Image inject_region_wise(const Image& img, const RegionMask& mask, double k_g, double k_p,
                         RngStream rng) {
  if (mask.height != img.height || mask.width != img.width)
    throw InvalidArgument("inject_region_wise: mask built for a different image size");
  if (!(k_p > 0.0)) throw InvalidArgument("inject_region_wise: k_p must be positive");
  if (k_g < 0.0) throw InvalidArgument("inject_region_wise: k_g must be nonnegative");

  std::vector<double> sigma(mask.means.size()), lambda(mask.means.size());
  for (std::size_t k = 0; k < mask.means.size(); ++k) {
    sigma[k] = region_sigma_g(k_g, mask.means[k]);
    lambda[k] = region_lambda_p(k_p, mask.means[k]);
  }

  Image out(img.height, img.width, img.channels, img.source_depth);
  for (int c = 0; c < img.channels; ++c) {
    RngStream ch = rng.derive(static_cast<std::uint64_t>(c));
    for (int y = 0; y < img.height; ++y) {
      const int row = (y / mask.stride) * mask.chunk_cols;
      for (int x = 0; x < img.width; ++x) {
        const int k = row + x / mask.stride;
        const double v = img.at(y, x, c);
        const double lam = lambda[k];
        const double xp = static_cast<double>(sample_poisson(ch, lam * v)) / lam;
        const double xg = sample_gaussian(ch, sigma[k]);
        out.at(y, x, c) = static_cast<float>(std::clamp(xp + xg, 0.0, 1.0));
      }
    }
  }
  return out;
}

Image inject_overall(const Image& img, double lambda_p, RngStream rng) {
  if (!(lambda_p > 0.0)) throw InvalidArgument("inject_overall: lambda_p must be positive");
  Image out(img.height, img.width, img.channels, img.source_depth);
  for (int c = 0; c < img.channels; ++c) {
    RngStream ch = rng.derive(static_cast<std::uint64_t>(c));
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        const double v = img.at(y, x, c);
        const double xp = static_cast<double>(sample_poisson(ch, lambda_p * v)) / lambda_p;
        out.at(y, x, c) = static_cast<float>(std::clamp(xp, 0.0, 1.0));
      }
    }
  }
  return out;
}

Image inject(const Image& img_filtered, const NoiseConfig& cfg, RngStream rng) {
  cfg.validate();
  const RegionMask mask = region_mask(img_filtered, cfg.stride);
  Image noisy = inject_region_wise(img_filtered, mask, cfg.k_g, cfg.k_p, rng.derive(0));
  return inject_overall(noisy, cfg.lambda_p_overall, rng.derive(1));
}

}  // namespace fm2s
