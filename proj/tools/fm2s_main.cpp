// fm2s command-line interface: denoise / inject / bench / profiles.
//
// Exit codes: 0 success; 1 unknown profile or bad configuration
// (including mismatched bench file sets); 2 I/O failure; 3 numerical
// divergence during training.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fm2s/bench.hpp"
#include "fm2s/errors.hpp"
#include "fm2s/filters.hpp"
#include "fm2s/image_io.hpp"
#include "fm2s/noise.hpp"
#include "fm2s/pipeline.hpp"
#include "fm2s/profiles.hpp"

namespace {

struct ProfileArgs {
  std::string profile;
  std::string config;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_profile_options(CLI::App* cmd, ProfileArgs& args) {
  auto* prof = cmd->add_option("--profile", args.profile, "built-in profile name");
  auto* conf = cmd->add_option("--config", args.config, "profile config file (key = value)");
  prof->excludes(conf);
  cmd->add_option("--set", args.overrides, "override a config key, e.g. --set k_g=120")
      ->take_all();
  cmd->add_option("--seed", args.seed, "RNG seed (default 0)")
      ->each([&args](const std::string&) { args.seed_given = true; });
}

fm2s::ProfileConfig resolve_profile(const ProfileArgs& args) {
  fm2s::ProfileConfig p;
  if (!args.config.empty())
    p = fm2s::load_profile_file(args.config);
  else if (!args.profile.empty())
    p = fm2s::get_profile(args.profile);
  else
    throw fm2s::InvalidArgument("one of --profile or --config is required");
  for (const auto& kv : args.overrides) fm2s::apply_override(p, kv);
  if (args.seed_given) p.train.seed = args.seed;
  return p;
}

int env_threads() {
  if (const char* e = std::getenv("FM2S_THREADS")) {
    const int n = std::atoi(e);
    if (n >= 1) return n;
  }
  return 1;
}

int run_denoise(const std::string& input, const std::string& output,
                const std::string& dump_target, const ProfileArgs& args, int threads) {
  const fm2s::ProfileConfig profile = resolve_profile(args);
  const fm2s::Image noisy = fm2s::load_image(input);

  if (!dump_target.empty()) {
    const fm2s::Image target = fm2s::apply_prefilter(noisy, profile.noise.filter);
    fm2s::save_image(target, dump_target);
    std::cout << "wrote pre-denoised target: " << dump_target << "\n";
  }

  const fm2s::DenoiseResult res = fm2s::denoise(noisy, profile.noise, profile.train, threads);
  fm2s::save_image(res.output, output);

  std::printf("profile:           %s\n", profile.name.c_str());
  std::printf("stage1 final loss: %.6e\n", res.stage1_final_loss);
  std::printf("stage2 final loss: %.6e\n", res.stage2_final_loss);
  std::printf("optimizer steps:   %lld\n", res.steps_run);
  std::printf("wall time:         %.2f s\n", res.wall_seconds);
  std::printf("wrote: %s\n", output.c_str());
  return 0;
}

int run_inject(const std::string& input, const std::string& output, const ProfileArgs& args) {
  const fm2s::ProfileConfig profile = resolve_profile(args);
  const fm2s::Image noisy = fm2s::load_image(input);
  const fm2s::Image filtered = fm2s::apply_prefilter(noisy, profile.noise.filter);
  const fm2s::Image injected =
      fm2s::inject(filtered, profile.noise, fm2s::RngStream(profile.train.seed));
  fm2s::save_image(injected, output);
  std::printf("wrote: %s\n", output.c_str());
  return 0;
}

int run_bench(const std::string& noisy_dir, const std::string& clean_dir,
              const std::string& out_csv, const ProfileArgs& args, int jobs, int threads,
              bool stable_csv) {
  const fm2s::ProfileConfig profile = resolve_profile(args);
  fm2s::BenchOptions opts;
  opts.jobs = jobs;
  opts.threads = threads;
  opts.stable_seconds = stable_csv;
  const fm2s::BenchReport report = fm2s::run_bench(noisy_dir, clean_dir, profile, args.seed, opts);

  const std::string csv = fm2s::to_csv(report);
  std::ofstream os(out_csv, std::ios::binary);
  if (!os) throw fm2s::IoError("cannot write " + out_csv);
  os << csv;
  if (!os) throw fm2s::IoError("write failed: " + out_csv);

  const fm2s::BenchRow agg = report.aggregate();
  std::printf("%zu images; mean PSNR %.2f -> %.2f dB, mean SSIM %.4f -> %.4f\n",
              report.rows.size(), agg.psnr_noisy, agg.psnr_out, agg.ssim_noisy, agg.ssim_out);
  std::printf("wrote: %s\n", out_csv.c_str());
  return 0;
}

int run_profiles() {
  for (const auto& name : fm2s::profile_names()) {
    const fm2s::ProfileConfig p = fm2s::get_profile(name);
    std::printf("%-16s lambda=%d stride=%d filter=%s/%d k_g=%g k_p=%g lambda_p=%g\n",
                name.c_str(), p.noise.lambda_amp, p.noise.stride,
                p.noise.filter.kind == fm2s::FilterSpec::Kind::median ? "median" : "gaussian",
                p.noise.filter.window, p.noise.k_g, p.noise.k_p, p.noise.lambda_p_overall);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FM2S zero-shot fluorescence microscopy denoiser"};
  app.require_subcommand(1);

  // denoise
  auto* denoise_cmd = app.add_subcommand("denoise", "denoise one image");
  std::string in_path, out_path, dump_target;
  ProfileArgs denoise_args;
  int threads = env_threads();
  denoise_cmd->add_option("--input", in_path, "noisy input image (PNG/TIFF)")->required();
  denoise_cmd->add_option("--output", out_path, "output image path")->required();
  denoise_cmd->add_option("--dump-target", dump_target, "also write the pre-denoised target");
  denoise_cmd->add_option("--threads", threads, "threads within one image (env FM2S_THREADS)");
  add_profile_options(denoise_cmd, denoise_args);

  // inject
  auto* inject_cmd = app.add_subcommand("inject", "pre-denoise then run one noise injection pass");
  std::string inj_in, inj_out;
  ProfileArgs inject_args;
  inject_cmd->add_option("--input", inj_in, "input image (PNG/TIFF)")->required();
  inject_cmd->add_option("--output", inj_out, "output image path")->required();
  add_profile_options(inject_cmd, inject_args);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "denoise a directory and report PSNR/SSIM CSV");
  std::string noisy_dir, clean_dir, out_csv;
  ProfileArgs bench_args;
  int jobs = 1;
  int bench_threads = env_threads();
  bool stable_csv = false;
  bench_cmd->add_option("--noisy-dir", noisy_dir, "directory of noisy images")->required();
  bench_cmd->add_option("--clean-dir", clean_dir, "directory of matching ground truths")->required();
  bench_cmd->add_option("--out", out_csv, "output CSV path")->required();
  bench_cmd->add_option("--jobs", jobs, "images denoised in parallel");
  bench_cmd->add_option("--threads", bench_threads, "threads within one image");
  bench_cmd->add_flag("--stable-csv", stable_csv,
                      "write 0 in the seconds column so reports are byte-reproducible");
  add_profile_options(bench_cmd, bench_args);

  // profiles
  auto* profiles_cmd = app.add_subcommand("profiles", "list built-in profiles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (denoise_cmd->parsed())
      return run_denoise(in_path, out_path, dump_target, denoise_args, threads);
    if (inject_cmd->parsed()) return run_inject(inj_in, inj_out, inject_args);
    if (bench_cmd->parsed())
      return run_bench(noisy_dir, clean_dir, out_csv, bench_args, jobs, bench_threads,
                       stable_csv);
    if (profiles_cmd->parsed()) return run_profiles();
  } catch (const fm2s::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fm2s::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fm2s::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
