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

#include "wmark/plane.hpp"

#include <algorithm>

namespace wmark {

RealPlane to_plane(const GrayImage& img) {
  RealPlane p(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    p.data[i] = static_cast<double>(img.data[i]);
  return p;
}

std::uint8_t clamp_u8(double v) {
  const long r = std::lround(v);
  return static_cast<std::uint8_t>(std::clamp(r, 0L, 255L));
}

GrayImage to_image(const RealPlane& p) {
  GrayImage img(p.width, p.height);
  for (std::size_t i = 0; i < p.data.size(); ++i)
    img.data[i] = clamp_u8(p.data[i]);
  return img;
}

RealPlane extract_square(const GrayImage& img, int r0, int c0, int side) {
  if (r0 < 0 || c0 < 0 || r0 + side > img.height || c0 + side > img.width)
    throw Error("square outside image bounds");
  RealPlane p(side, side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c)
      p.at(r, c) = static_cast<double>(img.at(r0 + r, c0 + c));
  return p;
}

void write_square(GrayImage& img, const RealPlane& p, int r0, int c0) {
  if (r0 < 0 || c0 < 0 || r0 + p.height > img.height ||
      c0 + p.width > img.width)
    throw Error("square outside image bounds");
  for (int r = 0; r < p.height; ++r)
    for (int c = 0; c < p.width; ++c)
      img.at(r0 + r, c0 + c) = clamp_u8(p.at(r, c));
}

std::vector<double> gaussian_kernel(double sigma) {
  if (sigma <= 0.0) return {1.0};
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[i + radius] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

RealPlane convolve_separable(const RealPlane& p,
                             const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = p.width, h = p.height;
  RealPlane tmp(w, h), out(w, h);

  // Rows.
  for (int r = 0; r < h; ++r) {
    const double* src = p.data.data() + static_cast<std::size_t>(r) * w;
    double* dst = tmp.data.data() + static_cast<std::size_t>(r) * w;
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      if (c >= radius && c + radius < w) {
        const double* s = src + c - radius;
        for (std::size_t i = 0; i < kernel.size(); ++i) acc += kernel[i] * s[i];
      } else {
        for (int i = -radius; i <= radius; ++i)
          acc += kernel[i + radius] * src[std::clamp(c + i, 0, w - 1)];
      }
      dst[c] = acc;
    }
  }
  // Columns.
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * tmp.at(std::clamp(r + i, 0, h - 1), c);
      out.at(r, c) = acc;
    }
  }
  return out;
}

double bilinear_at(const RealPlane& p, double r, double c, double fill) {
  if (r < 0.0 || c < 0.0 || r > p.height - 1 || c > p.width - 1) {
    // Blend with fill when the 2x2 support straddles the edge.
    if (r <= -1.0 || c <= -1.0 || r >= p.height || c >= p.width) return fill;
  }
  const int r0 = static_cast<int>(std::floor(r));
  const int c0 = static_cast<int>(std::floor(c));
  const double fr = r - r0, fc = c - c0;
  auto sample = [&](int rr, int cc) -> double {
    if (rr < 0 || cc < 0 || rr >= p.height || cc >= p.width) return fill;
    return p.at(rr, cc);
  };
  const double v00 = sample(r0, c0), v01 = sample(r0, c0 + 1);
  const double v10 = sample(r0 + 1, c0), v11 = sample(r0 + 1, c0 + 1);
  return (1 - fr) * ((1 - fc) * v00 + fc * v01) +
         fr * ((1 - fc) * v10 + fc * v11);
}

double bilinear_clamped(const RealPlane& p, double r, double c) {
  r = std::clamp(r, 0.0, static_cast<double>(p.height - 1));
  c = std::clamp(c, 0.0, static_cast<double>(p.width - 1));
  const int r0 = static_cast<int>(std::floor(r));
  const int c0 = static_cast<int>(std::floor(c));
  const int r1 = std::min(r0 + 1, p.height - 1);
  const int c1 = std::min(c0 + 1, p.width - 1);
  const double fr = r - r0, fc = c - c0;
  return (1 - fr) * ((1 - fc) * p.at(r0, c0) + fc * p.at(r0, c1)) +
         fr * ((1 - fc) * p.at(r1, c0) + fc * p.at(r1, c1));
}

}  // namespace wmark
