#include "fm2s/rng.hpp"

#include <bit>
#include <cmath>

#include "fm2s/errors.hpp"

namespace fm2s {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// std::lgamma writes the global signgam on glibc; the _r variant keeps
// concurrent samplers race-free. The argument is always positive here,
// so the sign output is irrelevant.
double log_gamma(double x) {
#ifdef __GLIBC__
  int sign = 0;
  return lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

std::uint64_t splitmix64(std::uint64_t& x) {
  x += kGolden;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t x = seed ^ mix64(stream_id + kGolden);
  for (auto& s : state_) s = splitmix64(x);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

RngStream RngStream::derive(std::uint64_t child) const {
  return RngStream(seed_, mix64(stream_id_ ^ mix64(child + 0x632BE59BD9B4E019ull)));
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t out = std::rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = std::rotl(state_[3], 45);
  return out;
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("next_below: bound must be positive");
  // reject the tail that would bias the modulus
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t n) {
  return mix64(seed ^ mix64(n + kGolden));
}

long long sample_poisson(RngStream& rng, double mean) {
  if (!std::isfinite(mean) || mean < 0.0)
    throw InvalidArgument("sample_poisson: mean must be finite and nonnegative");
  if (mean == 0.0) return 0;

  if (mean < 10.0) {
    // Inversion by sequential search: walk the pmf until the cumulative
    // mass passes one uniform draw.
    const double u = rng.next_double();
    double p = std::exp(-mean);
    double cum = p;
    long long k = 0;
    while (u > cum) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
      if (k > 1000000) break;  // cum has long since reached 1 numerically
    }
    return k;
  }

  // Hormann's PTRS transformed rejection. Constants as published; the
  // dominating distribution is G(u) = (2a/(0.5-|u|) + b)u + mean + 0.43.
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    double u = rng.next_double() - 0.5;
    double v = rng.next_double();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double s = std::log(v * inv_alpha / (a / (us * us) + b));
    double t = -mean + kf * log_mean - log_gamma(kf + 1.0);
    if (s <= t) return static_cast<long long>(kf);
  }
}

double sample_gaussian(RngStream& rng, double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0)
    throw InvalidArgument("sample_gaussian: sigma must be finite and nonnegative");
  if (sigma == 0.0) return 0.0;
  for (;;) {
    const double x = 2.0 * rng.next_double() - 1.0;
    const double y = 2.0 * rng.next_double() - 1.0;
    const double r2 = x * x + y * y;
    if (r2 >= 1.0 || r2 == 0.0) continue;
    return sigma * x * std::sqrt(-2.0 * std::log(r2) / r2);
  }
}

}  // namespace fm2s
