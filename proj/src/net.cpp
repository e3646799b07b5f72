#include "fm2s/net.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace fm2s {
namespace {

constexpr char kMagic[8] = {'F', 'M', '2', 'S', 'N', 'P', '0', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(os, bits);
}

float get_f32(std::istream& is) {
  const std::uint32_t bits = get_u32(is);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void put_array(std::ostream& os, const std::vector<float>& a,
               const std::vector<std::uint32_t>& dims) {
  put_u32(os, static_cast<std::uint32_t>(dims.size()));
  std::size_t n = 1;
  for (auto d : dims) {
    put_u32(os, d);
    n *= d;
  }
  if (n != a.size()) throw InvalidArgument("save_params: shape does not match array");
  for (float v : a) put_f32(os, v);
}

std::vector<float> get_array(std::istream& is, std::vector<std::uint32_t>& dims) {
  const std::uint32_t rank = get_u32(is);
  if (rank > 4) throw IoError("load_params: bad array rank");
  dims.resize(rank);
  std::size_t n = 1;
  for (auto& d : dims) {
    d = get_u32(is);
    n *= d;
  }
  if (n > (1u << 28)) throw IoError("load_params: array too large");
  std::vector<float> a(n);
  for (auto& v : a) v = get_f32(is);
  return a;
}

}  // namespace

void save_params(const NetParams& net, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os.write(kMagic, sizeof(kMagic));
  put_u32(os, static_cast<std::uint32_t>(net.width1()));
  put_u32(os, static_cast<std::uint32_t>(net.width2()));
  put_f32(os, net.leaky_slope);

  const auto u = [](int v) { return static_cast<std::uint32_t>(v); };
  put_array(os, net.conv1.weights, {u(net.conv1.out_channels), u(net.conv1.in_channels), 3, 3});
  put_array(os, net.conv1.bias, {u(net.conv1.out_channels)});
  put_array(os, net.conv2.weights, {u(net.conv2.out_channels), u(net.conv2.in_channels), 3, 3});
  put_array(os, net.conv2.bias, {u(net.conv2.out_channels)});
  put_array(os, net.conv3.weights, {u(net.conv3.out_channels), u(net.conv3.in_channels), 1, 1});
  put_array(os, net.conv3.bias, {u(net.conv3.out_channels)});
  if (!os) throw IoError("write failed: " + path.string());
}

NetParams load_params(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("not a parameter snapshot (bad magic): " + path.string());
  const int c1 = static_cast<int>(get_u32(is));
  const int c2 = static_cast<int>(get_u32(is));
  const float slope = get_f32(is);
  if (c1 < 1 || c2 < 1 || c1 > 65536 || c2 > 65536)
    throw IoError("bad widths in snapshot: " + path.string());

  NetParams net = NetParams::zeros(c1, c2, slope);
  auto arrays = param_arrays(net);
  for (auto* arr : arrays) {
    std::vector<std::uint32_t> dims;
    std::vector<float> a = get_array(is, dims);
    if (a.size() != arr->size())
      throw IoError("snapshot array size does not match header: " + path.string());
    *arr = std::move(a);
  }
  if (!is) throw IoError("truncated snapshot: " + path.string());
  return net;
}

}  // namespace fm2s
