#pragma once

#include <array>
#include <cstdint>

namespace fm2s {

// Counter-derived pseudorandom stream. The generator state is a pure
// function of (seed, stream_id), so identical ids reproduce identical
// sequences and derived streams can be consumed in any order or on any
// thread without affecting each other. Core generator is xoshiro256++
// seeded through splitmix64; all draws use integer bit manipulation so
// sequences are stable across runs.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Child stream whose id mixes (stream_id, child). Children with
  // distinct ids are statistically independent of the parent and of
  // each other.
  RngStream derive(std::uint64_t child) const;

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double next_double();

  // Uniform integer in [0, bound), unbiased. bound must be >= 1.
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::array<std::uint64_t, 4> state_{};
};

// Seed for the n-th element of a batch derived from one master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t n);

// Poisson draw with the given mean. Sequential-search inversion below
// mean 10, Hormann transformed rejection (PTRS) at and above. mean 0
// returns 0 deterministically. Throws InvalidArgument for negative or
// non-finite mean.
long long sample_poisson(RngStream& rng, double mean);

// Zero-mean normal draw with standard deviation sigma (Marsaglia polar
// method; trig-free). sigma 0 returns 0 deterministically. Throws
// InvalidArgument for negative or non-finite sigma.
double sample_gaussian(RngStream& rng, double sigma);

}  // namespace fm2s
