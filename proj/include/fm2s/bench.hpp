#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fm2s/profiles.hpp"

namespace fm2s {

struct BenchRow {
  std::string filename;
  double psnr_noisy = 0.0;
  double ssim_noisy = 0.0;
  double psnr_out = 0.0;
  double ssim_out = 0.0;
  double seconds = 0.0;
};

// Per-image rows in filename order, plus the aggregate (arithmetic
// means) as the last row.
struct BenchReport {
  std::vector<BenchRow> rows;
  BenchRow aggregate() const;
};

struct BenchOptions {
  int jobs = 1;     // images denoised in parallel
  int threads = 1;  // threads inside one image's training
  bool stable_seconds = false;  // write 0 in the seconds column so reports are byte-reproducible
};

// Denoises every image in noisy_dir and scores it against the matching
// filename in clean_dir. Image i trains with seed mix_seed(seed, i) in
// filename order, so results do not depend on --jobs. Throws
// InvalidArgument listing the difference when the file sets mismatch or
// when no images match.
BenchReport run_bench(const std::filesystem::path& noisy_dir,
                      const std::filesystem::path& clean_dir, const ProfileConfig& profile,
                      std::uint64_t seed, const BenchOptions& opts = {});

// filename,psnr_noisy,ssim_noisy,psnr_out,ssim_out,seconds with the
// aggregate row last. Infinite PSNR is written as "inf".
std::string to_csv(const BenchReport& report);

}  // namespace fm2s
