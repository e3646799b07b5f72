#include "fm2s/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "fm2s/errors.hpp"
#include "fm2s/filters.hpp"

namespace fm2s {
namespace {

Tensor4 channel_tensor(const Image& img, int c) {
  Tensor4 t(1, 1, img.height, img.width);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) t.at(0, 0, y, x) = img.at(y, x, c);
  return t;
}

void check_loss(double loss, long long step) {
  if (!std::isfinite(loss))
    throw DivergenceError(step, "non-finite loss at optimizer step " + std::to_string(step));
}

double training_step(NetParamsT<float>& net, AdamStateT<float>& adam, const Tensor4& input,
                     const Tensor4& target, int threads, long long step) {
  ForwardCacheT<float> cache;
  Tensor4 pred = net_forward(net, input, &cache, threads);
  Tensor4 grad_pred;
  const double loss = mse_loss(pred, target, grad_pred);
  check_loss(loss, step);
  NetParamsT<float> grads = net_backward(net, cache, grad_pred, threads);
  adam_step(net, grads, adam);
  return loss;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw InvalidArgument("TrainConfig: lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw InvalidArgument("TrainConfig: betas must be in [0,1)");
  if (stage1_steps < 1) throw InvalidArgument("TrainConfig: stage1_steps must be >= 1");
  if (epochs < 1) throw InvalidArgument("TrainConfig: epochs must be >= 1");
  if (sample_size < 1) throw InvalidArgument("TrainConfig: sample_size must be >= 1");
  if (net_c1 < 1 || net_c2 < 1) throw InvalidArgument("TrainConfig: net widths must be >= 1");
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0))
    throw InvalidArgument("TrainConfig: leaky_slope must be in [0,1)");
}

TrainingSet build_training_set(const Image& noisy, const NoiseConfig& cfg, int sample_size,
                               RngStream rng) {
  cfg.validate();
  if (sample_size < 1) throw InvalidArgument("build_training_set: sample_size must be >= 1");

  TrainingSet ts;
  ts.target = apply_prefilter(noisy, cfg.filter);
  const Image amplified = amplify_channels(ts.target, cfg.lambda_amp);

  ts.samples.reserve(sample_size);
  ts.target_channel.reserve(sample_size);
  std::uint64_t event = 0;
  while (static_cast<int>(ts.samples.size()) < sample_size) {
    const Image injected = inject(amplified, cfg, rng.derive(event));
    ++event;
    for (int j = 0; j < injected.channels; ++j) {
      if (static_cast<int>(ts.samples.size()) == sample_size) break;
      ts.samples.push_back(injected.channel(j));
      ts.target_channel.push_back(j / cfg.lambda_amp);
    }
  }
  return ts;
}

double train_stage1(NetParamsT<float>& net, AdamStateT<float>& adam, const Image& noisy,
                    const Image& target, const TrainConfig& cfg, int threads,
                    long long step_base) {
  if (!noisy.same_shape(target)) throw InvalidArgument("train_stage1: image shapes differ");
  double loss = 0.0;
  std::vector<Tensor4> inputs, targets;
  for (int c = 0; c < noisy.channels; ++c) {
    inputs.push_back(channel_tensor(noisy, c));
    targets.push_back(channel_tensor(target, c));
  }
  for (int step = 0; step < cfg.stage1_steps; ++step) {
    const int c = step % noisy.channels;
    loss = training_step(net, adam, inputs[c], targets[c], threads, step_base + step);
  }
  return loss;
}

double train_stage2(NetParamsT<float>& net, AdamStateT<float>& adam, const TrainingSet& ts,
                    const TrainConfig& cfg, RngStream shuffle_rng, int threads,
                    long long step_base, std::vector<double>* epoch_mean_losses) {
  if (ts.samples.empty()) throw InvalidArgument("train_stage2: no samples");
  if (ts.samples.size() != ts.target_channel.size())
    throw InvalidArgument("train_stage2: samples and target channels differ in length");

  std::vector<Tensor4> targets;
  for (int c = 0; c < ts.target.channels; ++c) targets.push_back(channel_tensor(ts.target, c));

  std::vector<std::size_t> order(ts.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (epoch_mean_losses) epoch_mean_losses->clear();

  double loss = 0.0;
  long long step = step_base;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    RngStream er = shuffle_rng.derive(static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[er.next_below(i)]);
    double epoch_sum = 0.0;
    for (std::size_t idx : order) {
      // samples stay as images; the per-step tensor copy is cheap next
      // to holding a second copy of the whole sample set
      loss = training_step(net, adam, channel_tensor(ts.samples[idx], 0),
                           targets[ts.target_channel[idx]], threads, step);
      epoch_sum += loss;
      ++step;
    }
    if (epoch_mean_losses)
      epoch_mean_losses->push_back(epoch_sum / static_cast<double>(order.size()));
  }
  return loss;
}

DenoiseResult denoise(const Image& noisy, const NoiseConfig& noise_cfg,
                      const TrainConfig& train_cfg, int threads) {
  noisy.validate();
  noise_cfg.validate();
  train_cfg.validate();

  const auto t0 = std::chrono::steady_clock::now();
  RngStream master(train_cfg.seed);

  NetParamsT<float> net =
      init_params<float>(master.derive(1), train_cfg.net_c1, train_cfg.net_c2,
                         train_cfg.leaky_slope);
  AdamStateT<float> adam =
      make_adam_state(net, train_cfg.lr, train_cfg.beta1, train_cfg.beta2);

  TrainingSet ts = build_training_set(noisy, noise_cfg, train_cfg.sample_size, master.derive(2));

  DenoiseResult res;
  res.stage1_final_loss =
      train_stage1(net, adam, noisy, ts.target, train_cfg, threads, 0);
  res.stage2_final_loss = train_stage2(net, adam, ts, train_cfg, master.derive(3), threads,
                                       train_cfg.stage1_steps);

  res.output = Image(noisy.height, noisy.width, noisy.channels, noisy.source_depth);
  for (int c = 0; c < noisy.channels; ++c) {
    const Tensor4 pred =
        net_forward(net, channel_tensor(noisy, c), static_cast<ForwardCacheT<float>*>(nullptr),
                    threads);
    for (int y = 0; y < noisy.height; ++y)
      for (int x = 0; x < noisy.width; ++x)
        res.output.at(y, x, c) = std::clamp(pred.at(0, 0, y, x), 0.0f, 1.0f);
  }

  res.steps_run = adam.step_count;
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace fm2s
