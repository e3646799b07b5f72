#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "fm2s/bench.hpp"
#include "fm2s/errors.hpp"
#include "fm2s/filters.hpp"
#include "fm2s/image_io.hpp"
#include "fm2s/metrics.hpp"
#include "fm2s/noise.hpp"
#include "fm2s/pipeline.hpp"
#include "fm2s/profiles.hpp"

namespace py = pybind11;
using namespace fm2s;

namespace {

py::array_t<float> image_to_numpy(const Image& img) {
  if (img.channels == 1) {
    py::array_t<float> arr({img.height, img.width});
    std::memcpy(arr.mutable_data(), img.data.data(), img.data.size() * sizeof(float));
    return arr;
  }
  py::array_t<float> arr({img.height, img.width, img.channels});
  std::memcpy(arr.mutable_data(), img.data.data(), img.data.size() * sizeof(float));
  return arr;
}

Image image_from_numpy(py::array_t<float, py::array::c_style | py::array::forcecast> arr,
                       int depth) {
  if (depth != 8 && depth != 16) throw InvalidArgument("depth must be 8 or 16");
  if (arr.ndim() != 2 && arr.ndim() != 3)
    throw InvalidArgument("expected a (H, W) or (H, W, C) array");
  const int h = static_cast<int>(arr.shape(0));
  const int w = static_cast<int>(arr.shape(1));
  const int c = arr.ndim() == 3 ? static_cast<int>(arr.shape(2)) : 1;
  Image img(h, w, c, depth == 8 ? SourceDepth::bit8 : SourceDepth::bit16);
  std::memcpy(img.data.data(), arr.data(), img.data.size() * sizeof(float));
  img.clamp01();
  return img;
}

ProfileConfig resolve(const std::string& profile, const std::string& config_text,
                      const std::vector<std::string>& overrides) {
  ProfileConfig p;
  if (!config_text.empty())
    p = parse_profile(config_text);
  else if (!profile.empty())
    p = get_profile(profile);
  else
    throw InvalidArgument("pass profile= or config=");
  for (const auto& kv : overrides) apply_override(p, kv);
  return p;
}

}  // namespace

PYBIND11_MODULE(_fm2s, m) {
  m.doc() = "Zero-shot fluorescence microscopy denoising (FM2S)";

  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgumentError", PyExc_ValueError);

  py::class_<Image>(m, "Image")
      .def(py::init<>())
      .def_readonly("height", &Image::height)
      .def_readonly("width", &Image::width)
      .def_readonly("channels", &Image::channels)
      .def_property_readonly(
          "depth", [](const Image& im) { return depth_bits(im.source_depth); })
      .def("to_numpy", &image_to_numpy)
      .def_static("from_numpy", &image_from_numpy, py::arg("array"), py::arg("depth") = 8,
                  "Build an image from a (H, W) or (H, W, C) float array; values are "
                  "clipped to [0, 1].")
      .def("__repr__", [](const Image& im) {
        return "<fm2s.Image " + std::to_string(im.height) + "x" + std::to_string(im.width) +
               "x" + std::to_string(im.channels) + " " + std::to_string(depth_bits(im.source_depth)) +
               "-bit>";
      });

  py::class_<QualityReport>(m, "QualityReport")
      .def_readonly("psnr", &QualityReport::psnr)
      .def_readonly("ssim", &QualityReport::ssim)
      .def("__repr__", [](const QualityReport& q) {
        return "<fm2s.QualityReport psnr=" + std::to_string(q.psnr) +
               " ssim=" + std::to_string(q.ssim) + ">";
      });

  py::class_<DenoiseResult>(m, "DenoiseResult")
      .def_readonly("output", &DenoiseResult::output)
      .def_readonly("stage1_final_loss", &DenoiseResult::stage1_final_loss)
      .def_readonly("stage2_final_loss", &DenoiseResult::stage2_final_loss)
      .def_readonly("wall_seconds", &DenoiseResult::wall_seconds)
      .def_readonly("steps_run", &DenoiseResult::steps_run);

  m.def("load_image", &load_image, py::arg("path"));
  m.def("save_image", &save_image, py::arg("image"), py::arg("path"));

  m.def("psnr", &psnr, py::arg("a"), py::arg("b"));
  m.def("ssim", &ssim, py::arg("a"), py::arg("b"));
  m.def("compare", &compare, py::arg("a"), py::arg("b"));

  m.def("median_filter", &median_filter, py::arg("image"), py::arg("window") = 3);
  m.def("gaussian_filter", &gaussian_filter, py::arg("image"), py::arg("window") = 3,
        py::arg("sigma") = 0.5);
  m.def("amplify_channels", &amplify_channels, py::arg("image"), py::arg("lambda_amp"));

  m.def("list_profiles", &profile_names);
  m.def("profile_text", [](const std::string& name) { return serialize_profile(get_profile(name)); },
        py::arg("name"));

  m.def(
      "inject",
      [](const Image& img, const std::string& profile, const std::string& config,
         const std::vector<std::string>& overrides, std::uint64_t seed) {
        const ProfileConfig p = resolve(profile, config, overrides);
        const Image filtered = apply_prefilter(img, p.noise.filter);
        return inject(filtered, p.noise, RngStream(seed));
      },
      py::arg("image"), py::arg("profile") = "", py::arg("config") = "",
      py::arg("overrides") = std::vector<std::string>{}, py::arg("seed") = 0,
      py::call_guard<py::gil_scoped_release>(),
      "Pre-denoise then run one noise injection pass.");

  m.def(
      "denoise",
      [](const Image& img, const std::string& profile, const std::string& config,
         const std::vector<std::string>& overrides, std::uint64_t seed, int threads) {
        ProfileConfig p = resolve(profile, config, overrides);
        p.train.seed = seed;
        return denoise(img, p.noise, p.train, threads);
      },
      py::arg("image"), py::arg("profile") = "", py::arg("config") = "",
      py::arg("overrides") = std::vector<std::string>{}, py::arg("seed") = 0,
      py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>(),
      "Train on the image itself and return the denoised result.");
}
