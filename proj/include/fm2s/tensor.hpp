#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace fm2s {

// Dense NCHW tensor. float for training speed, double for the
// finite-difference gradient checks.
template <typename T>
struct Tensor4T {
  int batch = 0;
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<T> data;

  Tensor4T() = default;
  Tensor4T(int n, int c, int h, int w, T fill = T(0))
      : batch(n),
        channels(c),
        height(h),
        width(w),
        data(static_cast<std::size_t>(n) * c * h * w, fill) {}

  std::size_t size() const { return data.size(); }

  std::size_t plane_offset(int n, int c) const {
    return (static_cast<std::size_t>(n) * channels + c) * height * width;
  }
  T* plane(int n, int c) { return data.data() + plane_offset(n, c); }
  const T* plane(int n, int c) const { return data.data() + plane_offset(n, c); }

  T& at(int n, int c, int y, int x) {
    return data[plane_offset(n, c) + static_cast<std::size_t>(y) * width + x];
  }
  T at(int n, int c, int y, int x) const {
    return data[plane_offset(n, c) + static_cast<std::size_t>(y) * width + x];
  }

  bool same_shape(const Tensor4T& o) const {
    return batch == o.batch && channels == o.channels && height == o.height && width == o.width;
  }

  bool all_finite() const {
    for (const T& v : data)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }
};

using Tensor4 = Tensor4T<float>;

}  // namespace fm2s
