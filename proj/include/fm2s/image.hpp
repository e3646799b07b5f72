#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fm2s {

enum class SourceDepth : std::uint8_t { bit8 = 8, bit16 = 16 };

inline int depth_bits(SourceDepth d) { return static_cast<int>(d); }
inline int depth_max(SourceDepth d) { return d == SourceDepth::bit8 ? 255 : 65535; }

// Grayscale raster with intensities in [0,1]. Row-major, channel-last:
// data[(y*width + x)*channels + c]. Multi-plane TIFF stacks load one
// plane per channel.
struct Image {
  int height = 0;
  int width = 0;
  int channels = 1;
  SourceDepth source_depth = SourceDepth::bit8;
  std::vector<float> data;

  Image() = default;
  Image(int h, int w, int c, SourceDepth depth = SourceDepth::bit8, float fill = 0.0f);

  std::size_t size() const { return data.size(); }
  std::size_t pixels() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }

  float& at(int y, int x, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float at(int y, int x, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  bool same_shape(const Image& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }

  // Single-channel copy of channel c.
  Image channel(int c) const;

  // Writes a single-channel image into channel c.
  void set_channel(int c, const Image& plane);

  void clamp01();

  // Throws InvalidArgument if any invariant is broken: dimensions below
  // 3x3, data length mismatch, or intensities outside [0,1].
  void validate() const;
};

}  // namespace fm2s
