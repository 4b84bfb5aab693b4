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

#ifndef WMARK_DAISY_HPP
#define WMARK_DAISY_HPP

#include <vector>

#include "wmark/plane.hpp"

namespace wmark {

/// Geometry of the descriptor: `layers` concentric rings with `directions`
/// sample points each, around a center sample. Ring l (1-based) has radius
/// radius*l/layers and is smoothed with sigma radius*(l+1)/(2*layers).
struct DaisyParams {
  int layers = 3;        // L
  int directions = 8;    // T, ring sample points
  int orientations = 8;  // H, gradient histogram length
  double radius = 15.0;  // outermost ring radius in pixels
  double base_sigma = 2.5;  // smoothing for the center sample

  double ring_radius(int l) const { return radius * l / layers; }
  double ring_sigma(int l) const { return radius * (l + 1) / (2.0 * layers); }
  void validate() const;
};

/// One rectified directional-gradient plane per orientation; all values
/// are >= 0 and the planes share the source image's dimensions.
struct OrientationMaps {
  int width = 0;
  int height = 0;
  std::vector<RealPlane> planes;  // size == orientations
};

/// max(0, directional derivative) for each of `orientations` equally
/// spaced directions; derivatives via central differences with replicate
/// borders. Image must be at least 3x3.
OrientationMaps orientation_maps(const GrayImage& img,
                                 const DaisyParams& params);

/// Gaussian-smoothed orientation stacks sampled on the ring grid. The
/// per-pixel descriptor (1 + layers*directions entries, each an
/// `orientations`-length histogram) is materialized on demand.
class DescriptorField {
 public:
  DescriptorField(OrientationMaps maps, const DaisyParams& params);

  int width() const { return width_; }
  int height() const { return height_; }
  const DaisyParams& params() const { return params_; }

  /// Entries: [0] center sample, then ring-major (layer 1 direction 0,
  /// layer 1 direction 1, ...). Sample positions are clamped at borders.
  std::vector<std::vector<double>> descriptor(int row, int col) const;

  /// Sum of the orientation histogram at one ring sample (used by the
  /// directional score).
  double ring_sum(int layer, int row, int col) const {
    return ring_sums_[layer].at(row, col);
  }
  /// Integer sample offset of ring `layer` (0-based) in direction t.
  std::pair<int, int> sample_offset(int layer, int t) const;

 private:
  DaisyParams params_;
  int width_ = 0;
  int height_ = 0;
  std::vector<RealPlane> center_;               // [orientation]
  std::vector<std::vector<RealPlane>> smooth_;  // [layer][orientation]
  std::vector<RealPlane> ring_sums_;            // [layer]
};

struct FeaturePoint {
  int row = 0;
  int col = 0;
  double score = 0.0;
};

/// Sorted by score descending, ties by (row, col) ascending.
using FeaturePointSet = std::vector<FeaturePoint>;

/// Scores every pixel: for each ring direction the descriptor samples are
/// aggregated (summed) across layers, and the score is the maximum over
/// directions.
FeaturePointSet directional_scores(const DescriptorField& field);

/// Keeps the top ceil(keep_fraction * N) points; 0 < keep_fraction <= 1.
FeaturePointSet select_points(const FeaturePointSet& points,
                              double keep_fraction);

/// Debug dump: "row,col,score" lines with a header.
std::string points_csv(const FeaturePointSet& points);

}  // namespace wmark

#endif  // WMARK_DAISY_HPP
