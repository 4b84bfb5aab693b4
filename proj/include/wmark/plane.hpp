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

#ifndef WMARK_PLANE_HPP
#define WMARK_PLANE_HPP

#include <cmath>
#include <vector>

#include "wmark/image.hpp"

namespace wmark {

/// Real-valued raster used for all intermediate arithmetic. Rounding back
/// to 8-bit happens exactly once, when a plane is written into a GrayImage.
struct RealPlane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  RealPlane() = default;
  RealPlane(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int r, int c) {
    return data[static_cast<std::size_t>(r) * width + c];
  }
  double at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * width + c];
  }
  bool same_dims(const RealPlane& o) const {
    return width == o.width && height == o.height;
  }
};

RealPlane to_plane(const GrayImage& img);

/// Rounds to nearest and clamps to [0,255].
GrayImage to_image(const RealPlane& p);

std::uint8_t clamp_u8(double v);

/// Copies the side x side square with top-left (r0,c0) out of img.
RealPlane extract_square(const GrayImage& img, int r0, int c0, int side);

/// Writes plane back at (r0,c0), rounding and clamping each value.
void write_square(GrayImage& img, const RealPlane& p, int r0, int c0);

/// Normalized 1-D Gaussian taps, radius = ceil(4*sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable convolution with replicate borders.
RealPlane convolve_separable(const RealPlane& p,
                             const std::vector<double>& kernel);

/// Bilinear sample at fractional (r,c); out-of-range samples return fill.
double bilinear_at(const RealPlane& p, double r, double c, double fill);

/// Bilinear sample with replicate borders (coordinates clamped into range).
double bilinear_clamped(const RealPlane& p, double r, double c);

}  // namespace wmark

#endif  // WMARK_PLANE_HPP
