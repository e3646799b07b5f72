#include "fm2s/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "fm2s/errors.hpp"
#include "fm2s/image_io.hpp"
#include "fm2s/metrics.hpp"
#include "fm2s/parallel.hpp"
#include "fm2s/pipeline.hpp"

namespace fm2s {
namespace {

bool image_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e == ".png" || e == ".tif" || e == ".tiff";
}

std::set<std::string> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("not a directory: " + dir.string());
  std::set<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && image_ext(entry.path()))
      names.insert(entry.path().filename().string());
  return names;
}

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& n : s) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

BenchRow BenchReport::aggregate() const {
  BenchRow agg;
  agg.filename = "aggregate";
  if (rows.empty()) return agg;
  for (const auto& r : rows) {
    agg.psnr_noisy += r.psnr_noisy;
    agg.ssim_noisy += r.ssim_noisy;
    agg.psnr_out += r.psnr_out;
    agg.ssim_out += r.ssim_out;
    agg.seconds += r.seconds;
  }
  const double n = static_cast<double>(rows.size());
  agg.psnr_noisy /= n;
  agg.ssim_noisy /= n;
  agg.psnr_out /= n;
  agg.ssim_out /= n;
  agg.seconds /= n;
  return agg;
}

BenchReport run_bench(const std::filesystem::path& noisy_dir,
                      const std::filesystem::path& clean_dir, const ProfileConfig& profile,
                      std::uint64_t seed, const BenchOptions& opts) {
  const std::set<std::string> noisy_names = list_images(noisy_dir);
  const std::set<std::string> clean_names = list_images(clean_dir);

  std::set<std::string> only_noisy, only_clean;
  std::set_difference(noisy_names.begin(), noisy_names.end(), clean_names.begin(),
                      clean_names.end(), std::inserter(only_noisy, only_noisy.begin()));
  std::set_difference(clean_names.begin(), clean_names.end(), noisy_names.begin(),
                      noisy_names.end(), std::inserter(only_clean, only_clean.begin()));
  if (!only_noisy.empty() || !only_clean.empty()) {
    std::string msg = "noisy/clean file sets differ.";
    if (!only_noisy.empty()) msg += " only in " + noisy_dir.string() + ": " + join(only_noisy) + ".";
    if (!only_clean.empty()) msg += " only in " + clean_dir.string() + ": " + join(only_clean) + ".";
    throw InvalidArgument(msg);
  }
  if (noisy_names.empty())
    throw InvalidArgument("no matching images between " + noisy_dir.string() + " and " +
                          clean_dir.string());

  const std::vector<std::string> names(noisy_names.begin(), noisy_names.end());
  BenchReport report;
  report.rows.resize(names.size());
  std::vector<std::exception_ptr> errors(names.size());

  parallel_for(0, static_cast<int>(names.size()), opts.jobs, [&](int i) {
    try {
      const Image noisy = load_image(noisy_dir / names[i]);
      const Image clean = load_image(clean_dir / names[i]);
      if (!noisy.same_shape(clean))
        throw InvalidArgument("noisy/clean size mismatch for " + names[i]);

      TrainConfig train = profile.train;
      train.seed = mix_seed(seed, static_cast<std::uint64_t>(i));
      const DenoiseResult res = denoise(noisy, profile.noise, train, opts.threads);

      const QualityReport before = compare(noisy, clean);
      const QualityReport after = compare(res.output, clean);
      BenchRow& row = report.rows[i];
      row.filename = names[i];
      row.psnr_noisy = before.psnr;
      row.ssim_noisy = before.ssim;
      row.psnr_out = after.psnr;
      row.ssim_out = after.ssim;
      row.seconds = opts.stable_seconds ? 0.0 : res.wall_seconds;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return report;
}

std::string to_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "filename,psnr_noisy,ssim_noisy,psnr_out,ssim_out,seconds\n";
  auto put = [&os](const BenchRow& r) {
    os << r.filename << ',' << format_metric(r.psnr_noisy) << ',' << format_metric(r.ssim_noisy)
       << ',' << format_metric(r.psnr_out) << ',' << format_metric(r.ssim_out) << ','
       << format_metric(r.seconds) << '\n';
  };
  for (const auto& r : report.rows) put(r);
  put(report.aggregate());
  return os.str();
}

}  // namespace fm2s
