#include "fm2s/image_io.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "fm2s/errors.hpp"

namespace fm2s {
namespace {

struct FileHandle {
  FILE* fp = nullptr;
  ~FileHandle() {
    if (fp) std::fclose(fp);
  }
};

std::uint32_t quantize(float v, int maxval) {
  double c = static_cast<double>(v);
  if (!(c > 0.0)) c = 0.0;  // non-finite quantizes to 0
  if (c > 1.0) c = 1.0;
  return static_cast<std::uint32_t>(std::llround(c * maxval));
}

bool is_png_header(const unsigned char* h) {
  static const unsigned char magic[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  return std::memcmp(h, magic, 8) == 0;
}

bool is_tiff_header(const unsigned char* h) {
  return (h[0] == 'I' && h[1] == 'I' && h[2] == 42 && h[3] == 0) ||
         (h[0] == 'M' && h[1] == 'M' && h[2] == 0 && h[3] == 42);
}

std::string png_color_name(int color_type) {
  switch (color_type) {
    case PNG_COLOR_TYPE_RGB: return "RGB";
    case PNG_COLOR_TYPE_RGB_ALPHA: return "RGBA";
    case PNG_COLOR_TYPE_PALETTE: return "palette";
    case PNG_COLOR_TYPE_GRAY_ALPHA: return "grayscale+alpha";
    default: return "color type " + std::to_string(color_type);
  }
}

struct PngRead {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngRead() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct PngWrite {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWrite() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

Image load_png(const std::filesystem::path& path) {
  FileHandle f;
  f.fp = std::fopen(path.string().c_str(), "rb");
  if (!f.fp) throw IoError("cannot open " + path.string());

  PngRead r;
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!r.png) throw IoError("libpng init failed for " + path.string());
  r.info = png_create_info_struct(r.png);
  if (!r.info) throw IoError("libpng init failed for " + path.string());

  // All C++ objects used below are constructed before setjmp so the
  // longjmp never skips a live destructor.
  Image img;
  std::vector<unsigned char> raw;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(r.png))) throw IoError("corrupt or truncated PNG: " + path.string());

  png_init_io(r.png, f.fp);
  png_read_info(r.png, r.info);

  const png_uint_32 w = png_get_image_width(r.png, r.info);
  const png_uint_32 h = png_get_image_height(r.png, r.info);
  const int depth = png_get_bit_depth(r.png, r.info);
  const int color = png_get_color_type(r.png, r.info);

  if (color != PNG_COLOR_TYPE_GRAY)
    throw IoError("unsupported PNG format in " + path.string() + ": " + png_color_name(color) +
                  " (only 8/16-bit grayscale is supported)");
  if (depth != 8 && depth != 16)
    throw IoError("unsupported PNG format in " + path.string() + ": " + std::to_string(depth) +
                  "-bit samples (only 8/16-bit grayscale is supported)");
  if (h < 3 || w < 3)
    throw IoError("image too small in " + path.string() + " (minimum 3x3)");

  if (depth == 16) png_set_swap(r.png);  // file is big-endian

  const std::size_t bytes_per_sample = depth / 8;
  const std::size_t stride = static_cast<std::size_t>(w) * bytes_per_sample;
  raw.resize(stride * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * stride;
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);

  img = Image(static_cast<int>(h), static_cast<int>(w), 1,
              depth == 8 ? SourceDepth::bit8 : SourceDepth::bit16);
  const double scale = 1.0 / depth_max(img.source_depth);
  if (depth == 8) {
    for (std::size_t i = 0; i < img.data.size(); ++i)
      img.data[i] = static_cast<float>(raw[i] * scale);
  } else {
    const std::uint16_t* p = reinterpret_cast<const std::uint16_t*>(raw.data());
    for (std::size_t i = 0; i < img.data.size(); ++i)
      img.data[i] = static_cast<float>(p[i] * scale);
  }
  return img;
}

void save_png(const Image& img, const std::filesystem::path& path) {
  if (img.channels != 1)
    throw IoError("PNG output supports a single channel; use TIFF for " +
                  std::to_string(img.channels) + "-channel stacks");

  FileHandle f;
  f.fp = std::fopen(path.string().c_str(), "wb");
  if (!f.fp) throw IoError("cannot write " + path.string());

  PngWrite w;
  w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!w.png) throw IoError("libpng init failed for " + path.string());
  w.info = png_create_info_struct(w.png);
  if (!w.info) throw IoError("libpng init failed for " + path.string());

  const int depth = depth_bits(img.source_depth);
  const int maxval = depth_max(img.source_depth);
  std::vector<unsigned char> raw;
  std::vector<png_bytep> rows;

  const std::size_t stride = static_cast<std::size_t>(img.width) * (depth / 8);
  raw.resize(stride * img.height);
  if (depth == 8) {
    for (std::size_t i = 0; i < img.data.size(); ++i)
      raw[i] = static_cast<unsigned char>(quantize(img.data[i], maxval));
  } else {
    std::uint16_t* p = reinterpret_cast<std::uint16_t*>(raw.data());
    for (std::size_t i = 0; i < img.data.size(); ++i)
      p[i] = static_cast<std::uint16_t>(quantize(img.data[i], maxval));
  }
  rows.resize(img.height);
  for (int y = 0; y < img.height; ++y) rows[y] = raw.data() + static_cast<std::size_t>(y) * stride;

  if (setjmp(png_jmpbuf(w.png))) throw IoError("PNG write failed: " + path.string());

  png_init_io(w.png, f.fp);
  png_set_IHDR(w.png, w.info, img.width, img.height, depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  if (depth == 16) png_set_swap(w.png);
  png_write_image(w.png, rows.data());
  png_write_end(w.png, nullptr);
}

struct TiffHandle {
  TIFF* tif = nullptr;
  ~TiffHandle() {
    if (tif) TIFFClose(tif);
  }
};

void quiet_libtiff() {
  static bool done = false;
  if (!done) {
    TIFFSetErrorHandler(nullptr);
    TIFFSetWarningHandler(nullptr);
    done = true;
  }
}

Image load_tiff(const std::filesystem::path& path) {
  quiet_libtiff();
  TiffHandle t;
  t.tif = TIFFOpen(path.string().c_str(), "r");
  if (!t.tif) throw IoError("cannot open " + path.string());

  std::vector<std::vector<float>> planes;
  std::uint32_t w0 = 0, h0 = 0;
  int depth0 = 0;

  do {
    std::uint32_t w = 0, h = 0;
    std::uint16_t bps = 0, spp = 1, fmt = SAMPLEFORMAT_UINT;
    if (!TIFFGetField(t.tif, TIFFTAG_IMAGEWIDTH, &w) ||
        !TIFFGetField(t.tif, TIFFTAG_IMAGELENGTH, &h))
      throw IoError("corrupt TIFF (missing dimensions): " + path.string());
    TIFFGetFieldDefaulted(t.tif, TIFFTAG_BITSPERSAMPLE, &bps);
    TIFFGetFieldDefaulted(t.tif, TIFFTAG_SAMPLESPERPIXEL, &spp);
    TIFFGetFieldDefaulted(t.tif, TIFFTAG_SAMPLEFORMAT, &fmt);

    if (spp != 1)
      throw IoError("unsupported TIFF format in " + path.string() + ": " +
                    std::to_string(spp) + " samples per pixel (only grayscale is supported)");
    if (fmt == SAMPLEFORMAT_IEEEFP)
      throw IoError("unsupported TIFF format in " + path.string() +
                    ": floating-point samples (only 8/16-bit unsigned integer is supported)");
    if (fmt != SAMPLEFORMAT_UINT)
      throw IoError("unsupported TIFF format in " + path.string() + ": sample format " +
                    std::to_string(fmt) + " (only 8/16-bit unsigned integer is supported)");
    if (bps != 8 && bps != 16)
      throw IoError("unsupported TIFF format in " + path.string() + ": " + std::to_string(bps) +
                    "-bit samples (only 8/16-bit integer is supported)");
    if (h < 3 || w < 3)
      throw IoError("image too small in " + path.string() + " (minimum 3x3)");

    if (planes.empty()) {
      w0 = w;
      h0 = h;
      depth0 = bps;
    } else if (w != w0 || h != h0 || bps != depth0) {
      throw IoError("TIFF planes disagree in size or depth: " + path.string());
    }

    const double scale = 1.0 / (bps == 8 ? 255.0 : 65535.0);
    std::vector<float> plane(static_cast<std::size_t>(w) * h);
    std::vector<unsigned char> scanline(TIFFScanlineSize(t.tif));
    for (std::uint32_t y = 0; y < h; ++y) {
      if (TIFFReadScanline(t.tif, scanline.data(), y) < 0)
        throw IoError("TIFF read failed at row " + std::to_string(y) + ": " + path.string());
      if (bps == 8) {
        for (std::uint32_t x = 0; x < w; ++x)
          plane[static_cast<std::size_t>(y) * w + x] = static_cast<float>(scanline[x] * scale);
      } else {
        const std::uint16_t* p = reinterpret_cast<const std::uint16_t*>(scanline.data());
        for (std::uint32_t x = 0; x < w; ++x)
          plane[static_cast<std::size_t>(y) * w + x] = static_cast<float>(p[x] * scale);
      }
    }
    planes.push_back(std::move(plane));
  } while (TIFFReadDirectory(t.tif));

  Image img(static_cast<int>(h0), static_cast<int>(w0), static_cast<int>(planes.size()),
            depth0 == 8 ? SourceDepth::bit8 : SourceDepth::bit16);
  for (int c = 0; c < img.channels; ++c) {
    const auto& plane = planes[c];
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        img.at(y, x, c) = plane[static_cast<std::size_t>(y) * img.width + x];
  }
  return img;
}

void save_tiff(const Image& img, const std::filesystem::path& path) {
  quiet_libtiff();
  TiffHandle t;
  t.tif = TIFFOpen(path.string().c_str(), "w");
  if (!t.tif) throw IoError("cannot write " + path.string());

  const int depth = depth_bits(img.source_depth);
  const int maxval = depth_max(img.source_depth);

  for (int c = 0; c < img.channels; ++c) {
    TIFFSetField(t.tif, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(img.width));
    TIFFSetField(t.tif, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(img.height));
    TIFFSetField(t.tif, TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(depth));
    TIFFSetField(t.tif, TIFFTAG_SAMPLESPERPIXEL, static_cast<std::uint16_t>(1));
    TIFFSetField(t.tif, TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_UINT);
    TIFFSetField(t.tif, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
    TIFFSetField(t.tif, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
    TIFFSetField(t.tif, TIFFTAG_ORIENTATION, ORIENTATION_TOPLEFT);
    TIFFSetField(t.tif, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
    TIFFSetField(t.tif, TIFFTAG_ROWSPERSTRIP, static_cast<std::uint32_t>(img.height));

    std::vector<unsigned char> scanline(static_cast<std::size_t>(img.width) * (depth / 8));
    for (int y = 0; y < img.height; ++y) {
      if (depth == 8) {
        for (int x = 0; x < img.width; ++x)
          scanline[x] = static_cast<unsigned char>(quantize(img.at(y, x, c), maxval));
      } else {
        std::uint16_t* p = reinterpret_cast<std::uint16_t*>(scanline.data());
        for (int x = 0; x < img.width; ++x)
          p[x] = static_cast<std::uint16_t>(quantize(img.at(y, x, c), maxval));
      }
      if (TIFFWriteScanline(t.tif, scanline.data(), y, 0) < 0)
        throw IoError("TIFF write failed at row " + std::to_string(y) + ": " + path.string());
    }
    if (c + 1 < img.channels) {
      if (!TIFFWriteDirectory(t.tif))
        throw IoError("TIFF directory write failed: " + path.string());
    }
  }
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  FileHandle probe;
  probe.fp = std::fopen(path.string().c_str(), "rb");
  if (!probe.fp) throw IoError("cannot open " + path.string());
  unsigned char header[8] = {0};
  const std::size_t n = std::fread(header, 1, sizeof(header), probe.fp);
  if (n < 8) throw IoError("file too short to identify: " + path.string());

  if (is_png_header(header)) return load_png(path);
  if (is_tiff_header(header)) return load_tiff(path);
  throw IoError("unsupported file format (not PNG or TIFF): " + path.string());
}

void save_image(const Image& img, const std::filesystem::path& path) {
  if (img.height < 1 || img.width < 1 || img.channels < 1 ||
      img.data.size() != static_cast<std::size_t>(img.height) * img.width * img.channels)
    throw InvalidArgument("save_image: malformed image");

  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (ext == ".png")
    save_png(img, path);
  else if (ext == ".tif" || ext == ".tiff")
    save_tiff(img, path);
  else
    throw IoError("unsupported output extension '" + ext + "' for " + path.string() +
                  " (use .png, .tif or .tiff)");
}

}  // namespace fm2s
