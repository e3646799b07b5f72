#include "fm2s/image.hpp"

#include <algorithm>
#include <string>

#include "fm2s/errors.hpp"

namespace fm2s {

Image::Image(int h, int w, int c, SourceDepth depth, float fill)
    : height(h),
      width(w),
      channels(c),
      source_depth(depth),
      data(static_cast<std::size_t>(h) * w * c, fill) {
  if (h < 0 || w < 0 || c < 1) throw InvalidArgument("Image: bad dimensions");
}

Image Image::channel(int c) const {
  if (c < 0 || c >= channels) throw InvalidArgument("Image::channel: index out of range");
  Image out(height, width, 1, source_depth);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out.at(y, x) = at(y, x, c);
  return out;
}

void Image::set_channel(int c, const Image& plane) {
  if (c < 0 || c >= channels) throw InvalidArgument("Image::set_channel: index out of range");
  if (plane.height != height || plane.width != width || plane.channels != 1)
    throw InvalidArgument("Image::set_channel: plane shape mismatch");
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) at(y, x, c) = plane.at(y, x);
}

void Image::clamp01() {
  for (auto& v : data) v = std::clamp(v, 0.0f, 1.0f);
}

void Image::validate() const {
  if (height < 3 || width < 3)
    throw InvalidArgument("Image: dimensions must be at least 3x3, got " +
                          std::to_string(height) + "x" + std::to_string(width));
  if (channels < 1) throw InvalidArgument("Image: channels must be >= 1");
  if (data.size() != static_cast<std::size_t>(height) * width * channels)
    throw InvalidArgument("Image: data length does not match dimensions");
  for (float v : data)
    if (!(v >= 0.0f && v <= 1.0f))
      throw InvalidArgument("Image: intensity outside [0,1]");
}

}  // namespace fm2s
