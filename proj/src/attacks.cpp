// Copyright 2026 The wmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wmark/attacks.hpp"

#include <jpeglib.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wmark/plane.hpp"
#include "wmark/rng.hpp"

namespace wmark {

namespace {

GrayImage gaussian_noise(const GrayImage& img, const GaussianNoiseAttack& a) {
  if (a.sigma < 0.0) throw Error("gaussian_noise: sigma must be >= 0");
  if (a.sigma == 0.0) return img;
  Rng rng(a.seed);
  GrayImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    out.data[i] = clamp_u8(img.data[i] + a.sigma * rng.gaussian());
  return out;
}

GrayImage salt_pepper(const GrayImage& img, const SaltPepperAttack& a) {
  if (a.density < 0.0 || a.density >= 1.0)
    throw Error("salt_pepper: density must be in [0, 1)");
  Rng rng(a.seed);
  GrayImage out = img;
  for (auto& px : out.data) {
    if (rng.unit() < a.density) px = rng.unit() < 0.5 ? 0 : 255;
  }
  return out;
}

GrayImage median_filter(const GrayImage& img, const MedianFilterAttack& a) {
  if (a.kernel < 3 || a.kernel % 2 == 0)
    throw Error("median_filter: kernel must be odd and >= 3");
  const int rad = a.kernel / 2;
  GrayImage out(img.width, img.height);
  std::vector<std::uint8_t> window;
  window.reserve(static_cast<std::size_t>(a.kernel) * a.kernel);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      window.clear();
      for (int dr = -rad; dr <= rad; ++dr)
        for (int dc = -rad; dc <= rad; ++dc)
          window.push_back(img.at(std::clamp(r + dr, 0, img.height - 1),
                                  std::clamp(c + dc, 0, img.width - 1)));
      auto mid = window.begin() + window.size() / 2;
      std::nth_element(window.begin(), mid, window.end());
      out.at(r, c) = *mid;
    }
  }
  return out;
}

GrayImage gaussian_filter(const GrayImage& img, const GaussianFilterAttack& a) {
  if (a.kernel < 3 || a.kernel % 2 == 0)
    throw Error("gaussian_filter: kernel must be odd and >= 3");
  if (a.sigma <= 0.0) throw Error("gaussian_filter: sigma must be positive");
  const int rad = a.kernel / 2;
  std::vector<double> k(a.kernel);
  double sum = 0.0;
  for (int i = -rad; i <= rad; ++i) {
    k[i + rad] = std::exp(-0.5 * i * i / (a.sigma * a.sigma));
    sum += k[i + rad];
  }
  for (double& v : k) v /= sum;
  RealPlane filtered = convolve_separable(to_plane(img), k);
  return to_image(filtered);
}

GrayImage crop_strip(const GrayImage& img, const CropAttack& a) {
  if (a.fraction <= 0.0 || a.fraction >= 1.0)
    throw Error("crop: fraction must be in (0, 1)");
  GrayImage out = img;
  const int rows = static_cast<int>(std::ceil(a.fraction * img.height));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < img.width; ++c) out.at(r, c) = 0;
  return out;
}

GrayImage wave_bend(const GrayImage& img, const WaveBendAttack& a) {
  if (a.period <= 0.0) throw Error("wave_bend: period must be positive");
  const RealPlane p = to_plane(img);
  GrayImage out(img.width, img.height);
  for (int c = 0; c < img.width; ++c) {
    const double shift = a.amplitude * std::sin(2.0 * M_PI * c / a.period);
    for (int r = 0; r < img.height; ++r)
      out.at(r, c) = clamp_u8(bilinear_clamped(p, r - shift, c));
  }
  return out;
}

GrayImage random_bend(const GrayImage& img, const RandomBendAttack& a) {
  if (a.disp_sigma < 0.0 || a.smooth_sigma < 0.0)
    throw Error("random_bend: sigmas must be >= 0");
  if (a.disp_sigma == 0.0) return img;

  Rng rng(a.seed);
  RealPlane dr(img.width, img.height), dc(img.width, img.height);
  for (std::size_t i = 0; i < dr.data.size(); ++i) dr.data[i] = rng.gaussian();
  for (std::size_t i = 0; i < dc.data.size(); ++i) dc.data[i] = rng.gaussian();

  const auto kernel = gaussian_kernel(a.smooth_sigma);
  dr = convolve_separable(dr, kernel);
  dc = convolve_separable(dc, kernel);

  // Rescale each field to the requested RMS displacement.
  for (RealPlane* f : {&dr, &dc}) {
    double ss = 0.0;
    for (double v : f->data) ss += v * v;
    const double rms = std::sqrt(ss / static_cast<double>(f->data.size()));
    const double gain = rms > 0.0 ? a.disp_sigma / rms : 0.0;
    for (double& v : f->data) v *= gain;
  }

  const RealPlane p = to_plane(img);
  GrayImage out(img.width, img.height);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      out.at(r, c) =
          clamp_u8(bilinear_clamped(p, r + dr.at(r, c), c + dc.at(r, c)));
  return out;
}

GrayImage jitter(const GrayImage& img, const JitterAttack& a) {
  if (a.count < 0 || a.count >= img.width)
    throw Error("jitter: column count out of range");
  if (a.count == 0) return img;

  // Choose `count` distinct columns via a seeded partial shuffle.
  Rng rng(a.seed);
  std::vector<int> cols(img.width);
  for (int i = 0; i < img.width; ++i) cols[i] = i;
  for (int i = 0; i < a.count; ++i) {
    const int j =
        i + static_cast<int>(rng.below(static_cast<std::uint64_t>(img.width - i)));
    std::swap(cols[i], cols[j]);
  }
  std::vector<bool> removed(img.width, false);
  for (int i = 0; i < a.count; ++i) removed[cols[i]] = true;

  GrayImage out(img.width, img.height);
  std::vector<int> keep;
  keep.reserve(img.width - a.count);
  for (int c = 0; c < img.width; ++c)
    if (!removed[c]) keep.push_back(c);
  for (int r = 0; r < img.height; ++r) {
    int c = 0;
    for (int src : keep) out.at(r, c++) = img.at(r, src);
    for (; c < img.width; ++c) out.at(r, c) = img.at(r, keep.back());
  }
  return out;
}

// --- JPEG via libjpeg, fully in memory -------------------------------------

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf setjmp_buffer;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  std::longjmp(err->setjmp_buffer, 1);
}

}  // namespace

GrayImage jpeg_cycle(const GrayImage& img, int quality) {
  if (quality < 1 || quality > 100)
    throw Error("jpeg: quality must be in [1, 100]");

  unsigned char* buf = nullptr;
  unsigned long buf_size = 0;
  {
    jpeg_compress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.setjmp_buffer)) {
      jpeg_destroy_compress(&cinfo);
      if (buf) free(buf);
      throw Error("jpeg: encode failed");
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buf, &buf_size);
    cinfo.image_width = static_cast<JDIMENSION>(img.width);
    cinfo.image_height = static_cast<JDIMENSION>(img.height);
    cinfo.input_components = 1;
    cinfo.in_color_space = JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    std::vector<std::uint8_t> row(img.width);
    while (cinfo.next_scanline < cinfo.image_height) {
      std::copy_n(img.data.data() +
                      static_cast<std::size_t>(cinfo.next_scanline) * img.width,
                  img.width, row.data());
      JSAMPROW rows[1] = {row.data()};
      jpeg_write_scanlines(&cinfo, rows, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
  }

  GrayImage out;
  {
    jpeg_decompress_struct dinfo;
    JpegErrorMgr jerr;
    dinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.setjmp_buffer)) {
      jpeg_destroy_decompress(&dinfo);
      free(buf);
      throw Error("jpeg: decode failed");
    }
    jpeg_create_decompress(&dinfo);
    jpeg_mem_src(&dinfo, buf, buf_size);
    jpeg_read_header(&dinfo, TRUE);
    dinfo.out_color_space = JCS_GRAYSCALE;
    jpeg_start_decompress(&dinfo);
    out = GrayImage(static_cast<int>(dinfo.output_width),
                    static_cast<int>(dinfo.output_height));
    while (dinfo.output_scanline < dinfo.output_height) {
      JSAMPROW rows[1] = {out.data.data() + static_cast<std::size_t>(
                                                dinfo.output_scanline) *
                                                out.width};
      jpeg_read_scanlines(&dinfo, rows, 1);
    }
    jpeg_finish_decompress(&dinfo);
    jpeg_destroy_decompress(&dinfo);
  }
  free(buf);
  return out;
}

GrayImage resize_bilinear(const GrayImage& img, int out_width,
                          int out_height) {
  if (out_width <= 0 || out_height <= 0)
    throw Error("resize: target dimensions must be positive");
  if (out_width == img.width && out_height == img.height) return img;
  const RealPlane p = to_plane(img);
  GrayImage out(out_width, out_height);
  const double sr = static_cast<double>(img.height) / out_height;
  const double sc = static_cast<double>(img.width) / out_width;
  for (int r = 0; r < out_height; ++r) {
    // Pixel centers map to pixel centers.
    const double src_r = (r + 0.5) * sr - 0.5;
    for (int c = 0; c < out_width; ++c) {
      const double src_c = (c + 0.5) * sc - 0.5;
      out.at(r, c) = clamp_u8(bilinear_clamped(p, src_r, src_c));
    }
  }
  return out;
}

GrayImage rotate_image(const GrayImage& img, double degrees,
                       std::uint8_t fill) {
  const double theta = degrees * M_PI / 180.0;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cy = (img.height - 1) / 2.0, cx = (img.width - 1) / 2.0;
  const RealPlane p = to_plane(img);
  GrayImage out(img.width, img.height);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const double y = r - cy, x = c - cx;
      const double src_c = cx + ct * x - st * y;
      const double src_r = cy + st * x + ct * y;
      out.at(r, c) =
          clamp_u8(bilinear_at(p, src_r, src_c, static_cast<double>(fill)));
    }
  }
  return out;
}

GrayImage rotate90(const GrayImage& img, int k) {
  k = ((k % 4) + 4) % 4;
  if (k == 0) return img;
  GrayImage out;
  if (k == 2) {
    out = GrayImage(img.width, img.height);
    for (int r = 0; r < img.height; ++r)
      for (int c = 0; c < img.width; ++c)
        out.at(r, c) = img.at(img.height - 1 - r, img.width - 1 - c);
    return out;
  }
  out = GrayImage(img.height, img.width);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      if (k == 1)
        out.at(img.width - 1 - c, r) = img.at(r, c);  // 90 deg
      else
        out.at(c, img.height - 1 - r) = img.at(r, c);  // 270 deg
    }
  }
  return out;
}

GrayImage apply_attack(const GrayImage& img, const AttackSpec& spec) {
  return std::visit(
      [&](const auto& a) -> GrayImage {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, GaussianNoiseAttack>)
          return gaussian_noise(img, a);
        else if constexpr (std::is_same_v<T, SaltPepperAttack>)
          return salt_pepper(img, a);
        else if constexpr (std::is_same_v<T, MedianFilterAttack>)
          return median_filter(img, a);
        else if constexpr (std::is_same_v<T, GaussianFilterAttack>)
          return gaussian_filter(img, a);
        else if constexpr (std::is_same_v<T, CropAttack>)
          return crop_strip(img, a);
        else if constexpr (std::is_same_v<T, ScaleAttack>) {
          if (a.factor <= 0.0) throw Error("scale: factor must be positive");
          return resize_bilinear(
              img, std::max(1, static_cast<int>(std::lround(img.width * a.factor))),
              std::max(1, static_cast<int>(std::lround(img.height * a.factor))));
        } else if constexpr (std::is_same_v<T, RotateAttack>)
          return rotate_image(img, a.degrees, a.fill);
        else if constexpr (std::is_same_v<T, JpegAttack>)
          return jpeg_cycle(img, a.quality);
        else if constexpr (std::is_same_v<T, WaveBendAttack>)
          return wave_bend(img, a);
        else if constexpr (std::is_same_v<T, RandomBendAttack>)
          return random_bend(img, a);
        else
          return jitter(img, a);
      },
      spec);
}

// --- parsing / serialization ------------------------------------------------

namespace {

using ParamMap = std::map<std::string, double>;

double take(ParamMap& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = it->second;
  params.erase(it);
  return v;
}

AttackSpec build_attack(const std::string& family, ParamMap params) {
  AttackSpec spec;
  if (family == "gaussian_noise") {
    GaussianNoiseAttack a;
    a.sigma = take(params, "sigma", a.sigma);
    a.seed = static_cast<std::uint64_t>(take(params, "seed", 1));
    spec = a;
  } else if (family == "salt_pepper") {
    SaltPepperAttack a;
    a.density = take(params, "density", a.density);
    a.seed = static_cast<std::uint64_t>(take(params, "seed", 1));
    spec = a;
  } else if (family == "median_filter") {
    MedianFilterAttack a;
    a.kernel = static_cast<int>(take(params, "kernel", a.kernel));
    spec = a;
  } else if (family == "gaussian_filter") {
    GaussianFilterAttack a;
    a.sigma = take(params, "sigma", a.sigma);
    a.kernel = static_cast<int>(take(params, "kernel", a.kernel));
    spec = a;
  } else if (family == "crop") {
    CropAttack a;
    a.fraction = take(params, "fraction", a.fraction);
    spec = a;
  } else if (family == "scale") {
    ScaleAttack a;
    a.factor = take(params, "factor", a.factor);
    spec = a;
  } else if (family == "rotate") {
    RotateAttack a;
    a.degrees = take(params, "degrees", a.degrees);
    a.fill = static_cast<std::uint8_t>(take(params, "fill", a.fill));
    spec = a;
  } else if (family == "jpeg") {
    JpegAttack a;
    a.quality = static_cast<int>(take(params, "quality", a.quality));
    spec = a;
  } else if (family == "wave_bend") {
    WaveBendAttack a;
    a.amplitude = take(params, "amplitude", a.amplitude);
    a.period = take(params, "period", a.period);
    spec = a;
  } else if (family == "random_bend") {
    RandomBendAttack a;
    a.disp_sigma = take(params, "disp_sigma", a.disp_sigma);
    a.smooth_sigma = take(params, "smooth_sigma", a.smooth_sigma);
    a.seed = static_cast<std::uint64_t>(take(params, "seed", 1));
    spec = a;
  } else if (family == "jitter") {
    JitterAttack a;
    a.count = static_cast<int>(take(params, "count", a.count));
    a.seed = static_cast<std::uint64_t>(take(params, "seed", 1));
    spec = a;
  } else {
    throw Error("unknown attack family: " + family);
  }
  if (!params.empty())
    throw Error("unknown parameter '" + params.begin()->first +
                "' for attack " + family);
  return spec;
}

ParamMap spec_params(const AttackSpec& spec) {
  ParamMap m;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, GaussianNoiseAttack>) {
          m["sigma"] = a.sigma;
          m["seed"] = static_cast<double>(a.seed);
        } else if constexpr (std::is_same_v<T, SaltPepperAttack>) {
          m["density"] = a.density;
          m["seed"] = static_cast<double>(a.seed);
        } else if constexpr (std::is_same_v<T, MedianFilterAttack>) {
          m["kernel"] = a.kernel;
        } else if constexpr (std::is_same_v<T, GaussianFilterAttack>) {
          m["sigma"] = a.sigma;
          m["kernel"] = a.kernel;
        } else if constexpr (std::is_same_v<T, CropAttack>) {
          m["fraction"] = a.fraction;
        } else if constexpr (std::is_same_v<T, ScaleAttack>) {
          m["factor"] = a.factor;
        } else if constexpr (std::is_same_v<T, RotateAttack>) {
          m["degrees"] = a.degrees;
          m["fill"] = a.fill;
        } else if constexpr (std::is_same_v<T, JpegAttack>) {
          m["quality"] = a.quality;
        } else if constexpr (std::is_same_v<T, WaveBendAttack>) {
          m["amplitude"] = a.amplitude;
          m["period"] = a.period;
        } else if constexpr (std::is_same_v<T, RandomBendAttack>) {
          m["disp_sigma"] = a.disp_sigma;
          m["smooth_sigma"] = a.smooth_sigma;
          m["seed"] = static_cast<double>(a.seed);
        } else {
          m["count"] = a.count;
          m["seed"] = static_cast<double>(a.seed);
        }
      },
      spec);
  return m;
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

std::string attack_family(const AttackSpec& spec) {
  static const char* names[] = {"gaussian_noise", "salt_pepper",
                                "median_filter",  "gaussian_filter",
                                "crop",           "scale",
                                "rotate",         "jpeg",
                                "wave_bend",      "random_bend",
                                "jitter"};
  return names[spec.index()];
}

AttackSpec parse_attack(const std::string& text) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  ParamMap params;
  if (colon != std::string::npos) {
    std::istringstream rest(text.substr(colon + 1));
    std::string token;
    while (std::getline(rest, token, ',')) {
      if (token.empty()) continue;
      const auto eq = token.find('=');
      if (eq == std::string::npos)
        throw Error("attack parameter must be key=value: " + token);
      try {
        params[token.substr(0, eq)] = std::stod(token.substr(eq + 1));
      } catch (const std::exception&) {
        throw Error("invalid attack parameter value: " + token);
      }
    }
  }
  return build_attack(family, std::move(params));
}

std::string attack_to_string(const AttackSpec& spec) {
  std::string s = attack_family(spec);
  const ParamMap params = spec_params(spec);
  char sep = ':';
  for (const auto& [k, v] : params) {
    s += sep;
    s += k + "=" + format_number(v);
    sep = ',';
  }
  return s;
}

std::string attack_to_json(const AttackSpec& spec) {
  nlohmann::json j;
  j["family"] = attack_family(spec);
  for (const auto& [k, v] : spec_params(spec)) j[k] = v;
  return j.dump();
}

AttackSpec attack_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("family"))
    throw Error("invalid attack JSON");
  ParamMap params;
  for (auto& [k, v] : j.items()) {
    if (k == "family") continue;
    if (!v.is_number()) throw Error("attack JSON parameter must be numeric");
    params[k] = v.get<double>();
  }
  return build_attack(j["family"].get<std::string>(), std::move(params));
}

}  // namespace wmark
