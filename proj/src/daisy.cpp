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

#include "wmark/daisy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wmark {

void DaisyParams::validate() const {
  if (layers < 1) throw Error("daisy: layers must be >= 1");
  if (directions < 2) throw Error("daisy: directions must be >= 2");
  if (orientations < 2) throw Error("daisy: orientations must be >= 2");
  if (radius <= 0.0) throw Error("daisy: radius must be positive");
  if (base_sigma <= 0.0) throw Error("daisy: base sigma must be positive");
}

OrientationMaps orientation_maps(const GrayImage& img,
                                 const DaisyParams& params) {
  params.validate();
  if (img.width < 3 || img.height < 3)
    throw Error("orientation_maps: image too small (minimum 3x3)");

  const int w = img.width, h = img.height;
  RealPlane dx(w, h), dy(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int cl = std::max(c - 1, 0), cr = std::min(c + 1, w - 1);
      const int ru = std::max(r - 1, 0), rd = std::min(r + 1, h - 1);
      dx.at(r, c) = 0.5 * (static_cast<double>(img.at(r, cr)) - img.at(r, cl));
      dy.at(r, c) = 0.5 * (static_cast<double>(img.at(rd, c)) - img.at(ru, c));
    }
  }

  OrientationMaps maps;
  maps.width = w;
  maps.height = h;
  maps.planes.reserve(params.orientations);
  for (int o = 0; o < params.orientations; ++o) {
    const double theta = 2.0 * M_PI * o / params.orientations;
    double cx = std::cos(theta), sy = std::sin(theta);
    // Snap the axis-aligned directions exactly so rectification zeros out
    // orthogonal responses instead of leaving 1e-17 dust.
    if (std::abs(cx) < 1e-12) cx = 0.0;
    if (std::abs(sy) < 1e-12) sy = 0.0;
    RealPlane plane(w, h);
    for (std::size_t i = 0; i < plane.data.size(); ++i)
      plane.data[i] = std::max(0.0, cx * dx.data[i] + sy * dy.data[i]);
    maps.planes.push_back(std::move(plane));
  }
  return maps;
}

DescriptorField::DescriptorField(OrientationMaps maps,
                                 const DaisyParams& params)
    : params_(params), width_(maps.width), height_(maps.height) {
  params.validate();
  if (static_cast<int>(maps.planes.size()) != params.orientations)
    throw Error("descriptor_field: orientation count mismatch");

  const auto base_kernel = gaussian_kernel(params.base_sigma);
  center_.reserve(params.orientations);
  for (const auto& plane : maps.planes)
    center_.push_back(convolve_separable(plane, base_kernel));

  smooth_.resize(params.layers);
  ring_sums_.reserve(params.layers);
  for (int l = 0; l < params.layers; ++l) {
    const auto kernel = gaussian_kernel(params.ring_sigma(l + 1));
    smooth_[l].reserve(params.orientations);
    RealPlane sum(width_, height_);
    for (const auto& plane : maps.planes) {
      RealPlane s = convolve_separable(plane, kernel);
      for (std::size_t i = 0; i < sum.data.size(); ++i)
        sum.data[i] += s.data[i];
      smooth_[l].push_back(std::move(s));
    }
    ring_sums_.push_back(std::move(sum));
  }
}

std::pair<int, int> DescriptorField::sample_offset(int layer, int t) const {
  const double angle = 2.0 * M_PI * t / params_.directions;
  const double rad = params_.ring_radius(layer + 1);
  return {static_cast<int>(std::lround(rad * std::sin(angle))),
          static_cast<int>(std::lround(rad * std::cos(angle)))};
}

std::vector<std::vector<double>> DescriptorField::descriptor(int row,
                                                             int col) const {
  std::vector<std::vector<double>> entries;
  entries.reserve(1 + static_cast<std::size_t>(params_.layers) *
                          params_.directions);
  std::vector<double> center(params_.orientations);
  for (int o = 0; o < params_.orientations; ++o)
    center[o] = center_[o].at(row, col);
  entries.push_back(std::move(center));

  for (int l = 0; l < params_.layers; ++l) {
    for (int t = 0; t < params_.directions; ++t) {
      const auto [dr, dc] = sample_offset(l, t);
      const int r = std::clamp(row + dr, 0, height_ - 1);
      const int c = std::clamp(col + dc, 0, width_ - 1);
      std::vector<double> entry(params_.orientations);
      for (int o = 0; o < params_.orientations; ++o)
        entry[o] = smooth_[l][o].at(r, c);
      entries.push_back(std::move(entry));
    }
  }
  return entries;
}

FeaturePointSet directional_scores(const DescriptorField& field) {
  const DaisyParams& p = field.params();
  const int w = field.width(), h = field.height();

  // Precompute per-layer sample offsets for every direction.
  std::vector<std::vector<std::pair<int, int>>> offsets(p.directions);
  for (int t = 0; t < p.directions; ++t) {
    offsets[t].reserve(p.layers);
    for (int l = 0; l < p.layers; ++l)
      offsets[t].push_back(field.sample_offset(l, t));
  }

  FeaturePointSet points;
  points.reserve(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double best = 0.0;
      for (int t = 0; t < p.directions; ++t) {
        double acc = 0.0;
        for (int l = 0; l < p.layers; ++l) {
          const auto [dr, dc] = offsets[t][l];
          acc += field.ring_sum(l, std::clamp(r + dr, 0, h - 1),
                                std::clamp(c + dc, 0, w - 1));
        }
        best = std::max(best, acc);
      }
      points.push_back({r, c, best});
    }
  }
  std::sort(points.begin(), points.end(),
            [](const FeaturePoint& a, const FeaturePoint& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.row != b.row) return a.row < b.row;
              return a.col < b.col;
            });
  return points;
}

FeaturePointSet select_points(const FeaturePointSet& points,
                              double keep_fraction) {
  if (points.empty()) throw Error("select_points: empty point set");
  if (keep_fraction <= 0.0 || keep_fraction > 1.0)
    throw Error("select_points: keep_fraction must be in (0, 1]");
  const std::size_t keep = static_cast<std::size_t>(
      std::ceil(keep_fraction * static_cast<double>(points.size())));
  FeaturePointSet out(points.begin(),
                      points.begin() + std::min(keep, points.size()));
  return out;
}

std::string points_csv(const FeaturePointSet& points) {
  std::ostringstream out;
  out << "row,col,score\n";
  for (const auto& p : points)
    out << p.row << ',' << p.col << ',' << p.score << '\n';
  return out.str();
}

}  // namespace wmark
