#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "fm2s/errors.hpp"
#include "fm2s/parallel.hpp"
#include "fm2s/rng.hpp"
#include "fm2s/tensor.hpp"

namespace fm2s {

// ---------------------------------------------------------------------------
// Layers and parameters

template <typename T>
struct ConvLayerT {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;  // 3 or 1
  std::vector<T> weights;  // [out][in][kernel*kernel]
  std::vector<T> bias;     // [out]

  static ConvLayerT zeros(int in_ch, int out_ch, int k) {
    ConvLayerT l;
    l.in_channels = in_ch;
    l.out_channels = out_ch;
    l.kernel = k;
    l.weights.assign(static_cast<std::size_t>(out_ch) * in_ch * k * k, T(0));
    l.bias.assign(out_ch, T(0));
    return l;
  }

  const T* kernel_at(int co, int ci) const {
    return weights.data() + (static_cast<std::size_t>(co) * in_channels + ci) * kernel * kernel;
  }
  T* kernel_at(int co, int ci) {
    return weights.data() + (static_cast<std::size_t>(co) * in_channels + ci) * kernel * kernel;
  }
  std::size_t parameter_count() const { return weights.size() + bias.size(); }
};

// 3-layer denoising net: conv3x3(1->C1), LeakyReLU, conv3x3(C1->C2),
// LeakyReLU, conv1x1(C2->1). Same-size zero padding throughout, no
// output clipping inside the network.
template <typename T>
struct NetParamsT {
  ConvLayerT<T> conv1, conv2, conv3;
  T leaky_slope = T(0.01);

  int width1() const { return conv1.out_channels; }
  int width2() const { return conv2.out_channels; }
  std::size_t parameter_count() const {
    return conv1.parameter_count() + conv2.parameter_count() + conv3.parameter_count();
  }

  static NetParamsT zeros(int c1, int c2, T slope = T(0.01)) {
    NetParamsT n;
    n.conv1 = ConvLayerT<T>::zeros(1, c1, 3);
    n.conv2 = ConvLayerT<T>::zeros(c1, c2, 3);
    n.conv3 = ConvLayerT<T>::zeros(c2, 1, 1);
    n.leaky_slope = slope;
    return n;
  }
};

using NetParams = NetParamsT<float>;

// Closed-form count: (9 C1 + C1) + (9 C1 C2 + C2) + (C2 + 1).
inline std::size_t network_parameter_count(int c1, int c2) {
  return (9u * c1 + c1) + (9u * static_cast<std::size_t>(c1) * c2 + c2) + (c2 + 1u);
}

// Fixed traversal order for optimizer state and serialization.
template <typename T>
std::array<std::vector<T>*, 6> param_arrays(NetParamsT<T>& p) {
  return {&p.conv1.weights, &p.conv1.bias, &p.conv2.weights,
          &p.conv2.bias,    &p.conv3.weights, &p.conv3.bias};
}
template <typename T>
std::array<const std::vector<T>*, 6> param_arrays(const NetParamsT<T>& p) {
  return {&p.conv1.weights, &p.conv1.bias, &p.conv2.weights,
          &p.conv2.bias,    &p.conv3.weights, &p.conv3.bias};
}

// Uniform +-1/sqrt(fan_in) init per layer, weights then bias, layer by
// layer, all from the given stream.
template <typename T>
NetParamsT<T> init_params(RngStream rng, int c1 = 16, int c2 = 24, double leaky_slope = 0.01) {
  if (c1 < 1 || c2 < 1) throw InvalidArgument("init_params: widths must be >= 1");
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0))
    throw InvalidArgument("init_params: leaky_slope must be in [0,1)");
  NetParamsT<T> net = NetParamsT<T>::zeros(c1, c2, static_cast<T>(leaky_slope));
  auto fill_layer = [&rng](ConvLayerT<T>& l) {
    const double fan_in = static_cast<double>(l.in_channels) * l.kernel * l.kernel;
    const double bound = 1.0 / std::sqrt(fan_in);
    for (auto& w : l.weights) w = static_cast<T>((2.0 * rng.next_double() - 1.0) * bound);
    for (auto& b : l.bias) b = static_cast<T>((2.0 * rng.next_double() - 1.0) * bound);
  };
  fill_layer(net.conv1);
  fill_layer(net.conv2);
  fill_layer(net.conv3);
  return net;
}

// ---------------------------------------------------------------------------
// Convolution

namespace detail {

// o[x] += wl*r[x-1] + wc*r[x] + wr*r[x+1], zero padding at the row ends.
template <typename T>
inline void accum_row3(const T* r, T wl, T wc, T wr, T* o, int w) {
  if (w == 1) {
    o[0] += wc * r[0];
    return;
  }
  o[0] += wc * r[0] + wr * r[1];
  for (int x = 1; x < w - 1; ++x) o[x] += wl * r[x - 1] + wc * r[x] + wr * r[x + 1];
  o[w - 1] += wl * r[w - 2] + wc * r[w - 1];
}

// out += cross-correlation(in, wk) with same-size zero padding.
template <typename T>
inline void corr3x3_accum_plane(const T* in, int h, int w, const T* wk, T* out) {
  for (int y = 0; y < h; ++y) {
    T* o = out + static_cast<std::size_t>(y) * w;
    if (y > 0) accum_row3(in + static_cast<std::size_t>(y - 1) * w, wk[0], wk[1], wk[2], o, w);
    accum_row3(in + static_cast<std::size_t>(y) * w, wk[3], wk[4], wk[5], o, w);
    if (y < h - 1) accum_row3(in + static_cast<std::size_t>(y + 1) * w, wk[6], wk[7], wk[8], o, w);
  }
}

// Four accumulators so the reduction pipelines; totals gathered in double.
template <typename T>
inline double dot(const T* a, const T* b, int n) {
  T s0 = T(0), s1 = T(0), s2 = T(0), s3 = T(0);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double s = static_cast<double>(s0) + static_cast<double>(s1) + static_cast<double>(s2) +
             static_cast<double>(s3);
  for (; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

template <typename T>
inline double plane_sum(const T* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(a[i]);
  return s;
}

}  // namespace detail

// Stride-1 cross-correlation with zero padding preserving H x W; bias
// added per output channel.
template <typename T>
Tensor4T<T> conv2d_forward(const Tensor4T<T>& in, const ConvLayerT<T>& layer, int threads = 1) {
  if (in.channels != layer.in_channels)
    throw InvalidArgument("conv2d_forward: input channels do not match layer");
  if (layer.kernel != 1 && layer.kernel != 3)
    throw InvalidArgument("conv2d_forward: kernel must be 1 or 3");

  const int h = in.height, w = in.width;
  Tensor4T<T> out(in.batch, layer.out_channels, h, w);
  const std::size_t plane = static_cast<std::size_t>(h) * w;

  parallel_for(0, in.batch * layer.out_channels, threads, [&](int idx) {
    const int n = idx / layer.out_channels;
    const int co = idx % layer.out_channels;
    T* o = out.plane(n, co);
    const T b = layer.bias[co];
    for (std::size_t i = 0; i < plane; ++i) o[i] = b;
    if (layer.kernel == 3) {
      for (int ci = 0; ci < layer.in_channels; ++ci)
        detail::corr3x3_accum_plane(in.plane(n, ci), h, w, layer.kernel_at(co, ci), o);
    } else {
      for (int ci = 0; ci < layer.in_channels; ++ci) {
        const T wv = *layer.kernel_at(co, ci);
        const T* p = in.plane(n, ci);
        for (std::size_t i = 0; i < plane; ++i) o[i] += wv * p[i];
      }
    }
  });
  return out;
}

// Exact analytic gradients of conv2d_forward. grad_input may be null
// when the upstream gradient is not needed (first layer).
template <typename T>
void conv2d_backward(const Tensor4T<T>& grad_out, const Tensor4T<T>& input,
                     const ConvLayerT<T>& layer, Tensor4T<T>* grad_input,
                     ConvLayerT<T>& grad_layer, int threads = 1) {
  if (input.channels != layer.in_channels)
    throw InvalidArgument("conv2d_backward: input channels do not match layer");
  if (grad_out.channels != layer.out_channels || grad_out.batch != input.batch ||
      grad_out.height != input.height || grad_out.width != input.width)
    throw InvalidArgument("conv2d_backward: grad_out shape mismatch");

  const int h = input.height, w = input.width;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  grad_layer = ConvLayerT<T>::zeros(layer.in_channels, layer.out_channels, layer.kernel);

  if (grad_input) {
    *grad_input = Tensor4T<T>(input.batch, input.channels, h, w);
    parallel_for(0, input.batch * layer.in_channels, threads, [&](int idx) {
      const int n = idx / layer.in_channels;
      const int ci = idx % layer.in_channels;
      T* gi = grad_input->plane(n, ci);
      if (layer.kernel == 3) {
        for (int co = 0; co < layer.out_channels; ++co) {
          const T* wk = layer.kernel_at(co, ci);
          const T flipped[9] = {wk[8], wk[7], wk[6], wk[5], wk[4], wk[3], wk[2], wk[1], wk[0]};
          detail::corr3x3_accum_plane(grad_out.plane(n, co), h, w, flipped, gi);
        }
      } else {
        for (int co = 0; co < layer.out_channels; ++co) {
          const T wv = *layer.kernel_at(co, ci);
          const T* g = grad_out.plane(n, co);
          for (std::size_t i = 0; i < plane; ++i) gi[i] += wv * g[i];
        }
      }
    });
  }

  parallel_for(0, layer.out_channels, threads, [&](int co) {
    double gb = 0.0;
    for (int n = 0; n < input.batch; ++n)
      gb += detail::plane_sum(grad_out.plane(n, co), plane);
    grad_layer.bias[co] = static_cast<T>(gb);

    for (int ci = 0; ci < layer.in_channels; ++ci) {
      T* gw = grad_layer.kernel_at(co, ci);
      if (layer.kernel == 3) {
        for (int dy = 0; dy < 3; ++dy) {
          const int y_lo = std::max(0, 1 - dy);
          const int y_hi = std::min(h - 1, h - dy);
          for (int dx = 0; dx < 3; ++dx) {
            const int x_lo = std::max(0, 1 - dx);
            const int x_hi = std::min(w - 1, w - dx);
            const int len = x_hi - x_lo + 1;
            double acc = 0.0;
            for (int n = 0; n < input.batch; ++n) {
              const T* g = grad_out.plane(n, co);
              const T* p = input.plane(n, ci);
              for (int y = y_lo; y <= y_hi; ++y)
                acc += detail::dot(g + static_cast<std::size_t>(y) * w + x_lo,
                                   p + static_cast<std::size_t>(y + dy - 1) * w + x_lo + dx - 1,
                                   len);
            }
            gw[dy * 3 + dx] = static_cast<T>(acc);
          }
        }
      } else {
        double acc = 0.0;
        for (int n = 0; n < input.batch; ++n)
          acc += detail::dot(grad_out.plane(n, co), input.plane(n, ci), static_cast<int>(plane));
        gw[0] = static_cast<T>(acc);
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Activation and loss

// out = x for x >= 0 else slope*x. The derivative at exactly 0 is 1.
template <typename T>
Tensor4T<T> leaky_relu(const Tensor4T<T>& in, T slope) {
  Tensor4T<T> out(in.batch, in.channels, in.height, in.width);
  for (std::size_t i = 0; i < in.data.size(); ++i) {
    const T v = in.data[i];
    out.data[i] = v >= T(0) ? v : slope * v;
  }
  return out;
}

template <typename T>
Tensor4T<T> leaky_relu_backward(const Tensor4T<T>& grad_out, const Tensor4T<T>& forward_in,
                                T slope) {
  if (!grad_out.same_shape(forward_in))
    throw InvalidArgument("leaky_relu_backward: shape mismatch");
  Tensor4T<T> grad_in(grad_out.batch, grad_out.channels, grad_out.height, grad_out.width);
  for (std::size_t i = 0; i < grad_out.data.size(); ++i)
    grad_in.data[i] = forward_in.data[i] >= T(0) ? grad_out.data[i] : slope * grad_out.data[i];
  return grad_in;
}

// Mean squared error over all elements; grad_pred = 2(pred-target)/N.
template <typename T>
double mse_loss(const Tensor4T<T>& pred, const Tensor4T<T>& target, Tensor4T<T>& grad_pred) {
  if (!pred.same_shape(target)) throw InvalidArgument("mse_loss: shape mismatch");
  grad_pred = Tensor4T<T>(pred.batch, pred.channels, pred.height, pred.width);
  const double inv_n = 1.0 / static_cast<double>(pred.data.size());
  double se = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i]);
    se += d * d;
    grad_pred.data[i] = static_cast<T>(2.0 * d * inv_n);
  }
  return se * inv_n;
}

// ---------------------------------------------------------------------------
// Adam

template <typename T>
struct AdamStateT {
  std::vector<T> first_moment;
  std::vector<T> second_moment;
  long long step_count = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

using AdamState = AdamStateT<float>;

template <typename T>
AdamStateT<T> make_adam_state(const NetParamsT<T>& params, double lr = 1e-3, double beta1 = 0.9,
                              double beta2 = 0.999) {
  if (!(lr > 0.0)) throw InvalidArgument("make_adam_state: lr must be positive");
  AdamStateT<T> st;
  st.lr = lr;
  st.beta1 = beta1;
  st.beta2 = beta2;
  st.first_moment.assign(params.parameter_count(), T(0));
  st.second_moment.assign(params.parameter_count(), T(0));
  return st;
}

// Canonical Adam with bias correction:
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   theta <- theta - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
template <typename T>
void adam_step(NetParamsT<T>& params, const NetParamsT<T>& grads, AdamStateT<T>& st) {
  auto ps = param_arrays(params);
  auto gs = param_arrays(grads);
  ++st.step_count;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step_count));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step_count));
  std::size_t k = 0;
  for (std::size_t a = 0; a < ps.size(); ++a) {
    std::vector<T>& p = *ps[a];
    const std::vector<T>& g = *gs[a];
    if (p.size() != g.size()) throw InvalidArgument("adam_step: gradient shape mismatch");
    if (st.first_moment.size() < k + p.size())
      throw InvalidArgument("adam_step: state size mismatch");
    for (std::size_t i = 0; i < p.size(); ++i, ++k) {
      const double gv = static_cast<double>(g[i]);
      const double m = st.beta1 * static_cast<double>(st.first_moment[k]) + (1.0 - st.beta1) * gv;
      const double v =
          st.beta2 * static_cast<double>(st.second_moment[k]) + (1.0 - st.beta2) * gv * gv;
      st.first_moment[k] = static_cast<T>(m);
      st.second_moment[k] = static_cast<T>(v);
      const double m_hat = m / c1;
      const double v_hat = v / c2;
      p[i] = static_cast<T>(static_cast<double>(p[i]) -
                            st.lr * m_hat / (std::sqrt(v_hat) + st.epsilon));
    }
  }
}

// ---------------------------------------------------------------------------
// Whole network

template <typename T>
struct ForwardCacheT {
  Tensor4T<T> input;
  Tensor4T<T> pre1, act1;  // conv1 output, after LeakyReLU
  Tensor4T<T> pre2, act2;  // conv2 output, after LeakyReLU
};

template <typename T>
Tensor4T<T> net_forward(const NetParamsT<T>& net, const Tensor4T<T>& input,
                        ForwardCacheT<T>* cache = nullptr, int threads = 1) {
  if (input.channels != net.conv1.in_channels)
    throw InvalidArgument("net_forward: expected " + std::to_string(net.conv1.in_channels) +
                          "-channel input, got " + std::to_string(input.channels));
  assert(input.all_finite());
  Tensor4T<T> pre1 = conv2d_forward(input, net.conv1, threads);
  assert(pre1.all_finite());
  Tensor4T<T> act1 = leaky_relu(pre1, net.leaky_slope);
  Tensor4T<T> pre2 = conv2d_forward(act1, net.conv2, threads);
  assert(pre2.all_finite());
  Tensor4T<T> act2 = leaky_relu(pre2, net.leaky_slope);
  Tensor4T<T> out = conv2d_forward(act2, net.conv3, threads);
  assert(out.all_finite());
  if (cache) {
    cache->input = input;
    cache->pre1 = std::move(pre1);
    cache->act1 = std::move(act1);
    cache->pre2 = std::move(pre2);
    cache->act2 = std::move(act2);
  }
  return out;
}

// Parameter gradients for the cached forward pass. The returned struct
// reuses NetParamsT as a gradient container (leaky_slope is not a
// trainable parameter and stays 0).
template <typename T>
NetParamsT<T> net_backward(const NetParamsT<T>& net, const ForwardCacheT<T>& cache,
                           const Tensor4T<T>& grad_output, int threads = 1) {
  NetParamsT<T> grads = NetParamsT<T>::zeros(net.width1(), net.width2(), T(0));
  Tensor4T<T> g_act2;
  conv2d_backward(grad_output, cache.act2, net.conv3, &g_act2, grads.conv3, threads);
  Tensor4T<T> g_pre2 = leaky_relu_backward(g_act2, cache.pre2, net.leaky_slope);
  Tensor4T<T> g_act1;
  conv2d_backward(g_pre2, cache.act1, net.conv2, &g_act1, grads.conv2, threads);
  Tensor4T<T> g_pre1 = leaky_relu_backward(g_act1, cache.pre1, net.leaky_slope);
  conv2d_backward(g_pre1, cache.input, net.conv1, static_cast<Tensor4T<T>*>(nullptr),
                  grads.conv1, threads);
  return grads;
}

// ---------------------------------------------------------------------------
// Parameter snapshots (debug/resume): versioned header + shape-tagged
// little-endian float32 arrays.

void save_params(const NetParams& net, const std::filesystem::path& path);
NetParams load_params(const std::filesystem::path& path);

}  // namespace fm2s
