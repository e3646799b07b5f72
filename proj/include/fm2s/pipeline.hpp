#pragma once

#include <cstdint>
#include <vector>

#include "fm2s/image.hpp"
#include "fm2s/net.hpp"
#include "fm2s/noise.hpp"
#include "fm2s/rng.hpp"

namespace fm2s {

struct TrainConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  int stage1_steps = 5;
  int epochs = 5;
  int sample_size = 450;
  std::uint64_t seed = 0;
  int net_c1 = 16;
  int net_c2 = 24;
  double leaky_slope = 0.01;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct DenoiseResult {
  Image output;
  double stage1_final_loss = 0.0;
  double stage2_final_loss = 0.0;
  double wall_seconds = 0.0;
  long long steps_run = 0;
};

// Pre-denoised target plus the injected single-channel samples. Sample
// i trains against channel target_channel[i] of target.
struct TrainingSet {
  Image target;  // u, same channel count as the input image
  std::vector<Image> samples;
  std::vector<int> target_channel;
};

// Pre-denoises, channel-amplifies, then runs injection events over the
// amplified stack until sample_size single-channel samples accumulate
// (the excess of the last event is truncated). Event e draws from
// rng.derive(e).
TrainingSet build_training_set(const Image& noisy, const NoiseConfig& cfg, int sample_size,
                               RngStream rng);

// Stage 1: stage1_steps Adam updates on the (noisy, target) pair, batch
// size 1; multi-channel images train per channel round-robin. Returns
// the loss at the last step. step_base offsets the step index used in
// divergence diagnostics.
double train_stage1(NetParamsT<float>& net, AdamStateT<float>& adam, const Image& noisy,
                    const Image& target, const TrainConfig& cfg, int threads = 1,
                    long long step_base = 0);

// Stage 2: cfg.epochs passes over the samples in seeded-shuffled order,
// one Adam update per sample. Returns the loss at the last step.
// epoch_mean_losses, when given, receives the mean loss of each epoch.
double train_stage2(NetParamsT<float>& net, AdamStateT<float>& adam, const TrainingSet& ts,
                    const TrainConfig& cfg, RngStream shuffle_rng, int threads = 1,
                    long long step_base = 0, std::vector<double>* epoch_mean_losses = nullptr);

// The full procedure: build the training set, run both stages, then
// apply the net to the original noisy image (per channel) and clip to
// [0,1]. Deterministic for a given (image, configs, seed) when
// threads == 1. Throws DivergenceError naming the step on a non-finite
// loss.
DenoiseResult denoise(const Image& noisy, const NoiseConfig& noise_cfg,
                      const TrainConfig& train_cfg, int threads = 1);

}  // namespace fm2s
