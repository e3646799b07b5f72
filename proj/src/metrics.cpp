#include "fm2s/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fm2s/errors.hpp"

namespace fm2s {
namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;
constexpr double kSsimRange = 1.0;

void require_single_channel_pair(const Image& a, const Image& b, const char* op) {
  if (a.height != b.height || a.width != b.width || a.channels != b.channels)
    throw InvalidArgument(std::string(op) + ": image dimensions differ");
  if (a.channels != 1)
    throw InvalidArgument(std::string(op) + ": expected single-channel images");
}

std::vector<double> ssim_window_1d() {
  std::vector<double> k(kSsimWindow);
  const int r = kSsimWindow / 2;
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = (i - r) / kSsimSigma;
    k[i] = std::exp(-0.5 * d * d);
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable weighted filter, valid positions only: in is h*w,
// out is (h-win+1)*(w-win+1).
void filter_valid(const std::vector<double>& in, int h, int w, const std::vector<double>& k,
                  std::vector<double>& tmp, std::vector<double>& out) {
  const int win = static_cast<int>(k.size());
  const int ow = w - win + 1;
  const int oh = h - win + 1;
  tmp.assign(static_cast<std::size_t>(h) * ow, 0.0);
  for (int y = 0; y < h; ++y) {
    const double* row = in.data() + static_cast<std::size_t>(y) * w;
    double* trow = tmp.data() + static_cast<std::size_t>(y) * ow;
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < win; ++i) s += k[i] * row[x + i];
      trow[x] = s;
    }
  }
  out.assign(static_cast<std::size_t>(oh) * ow, 0.0);
  for (int y = 0; y < oh; ++y) {
    double* orow = out.data() + static_cast<std::size_t>(y) * ow;
    for (int i = 0; i < win; ++i) {
      const double* trow = tmp.data() + static_cast<std::size_t>(y + i) * ow;
      const double ki = k[i];
      for (int x = 0; x < ow; ++x) orow[x] += ki * trow[x];
    }
  }
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  require_single_channel_pair(a, b, "psnr");
  double se = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) {
  require_single_channel_pair(a, b, "ssim");
  if (a.height < kSsimWindow || a.width < kSsimWindow)
    throw InvalidArgument("ssim: image smaller than the 11x11 window");

  const int h = a.height, w = a.width;
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double va = a.data[i], vb = b.data[i];
    pa[i] = va;
    pb[i] = vb;
    paa[i] = va * va;
    pbb[i] = vb * vb;
    pab[i] = va * vb;
  }

  const auto k = ssim_window_1d();
  std::vector<double> tmp, mu_a, mu_b, s_aa, s_bb, s_ab;
  filter_valid(pa, h, w, k, tmp, mu_a);
  filter_valid(pb, h, w, k, tmp, mu_b);
  filter_valid(paa, h, w, k, tmp, s_aa);
  filter_valid(pbb, h, w, k, tmp, s_bb);
  filter_valid(pab, h, w, k, tmp, s_ab);

  const double c1 = (kSsimK1 * kSsimRange) * (kSsimK1 * kSsimRange);
  const double c2 = (kSsimK2 * kSsimRange) * (kSsimK2 * kSsimRange);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = s_aa[i] - ma * ma;
    const double vb = s_bb[i] - mb * mb;
    const double cov = s_ab[i] - ma * mb;
    const double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
    const double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
    total += num / den;
  }
  return total / static_cast<double>(mu_a.size());
}

QualityReport compare(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw InvalidArgument("compare: image dimensions differ");
  QualityReport rep;
  if (a.channels == 1) {
    rep.psnr = psnr(a, b);
    rep.ssim = ssim(a, b);
    return rep;
  }
  for (int c = 0; c < a.channels; ++c) {
    const Image ca = a.channel(c), cb = b.channel(c);
    rep.psnr += psnr(ca, cb);
    rep.ssim += ssim(ca, cb);
  }
  rep.psnr /= a.channels;
  rep.ssim /= a.channels;
  return rep;
}

}  // namespace fm2s
