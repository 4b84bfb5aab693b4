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

#ifndef WMARK_AREAS_HPP
#define WMARK_AREAS_HPP

#include <string>
#include <vector>

#include "wmark/daisy.hpp"
#include "wmark/image.hpp"

namespace wmark {

/// Square embedding region. Areas in an AreaSet are pairwise disjoint,
/// fully interior and ordered by entropy descending (ties by row, col).
struct FeatureArea {
  int row = 0;  // top-left
  int col = 0;
  int side = 0;
  double entropy = 0.0;

  bool overlaps(const FeatureArea& o) const {
    return row < o.row + o.side && o.row < row + side && col < o.col + o.side &&
           o.col < col + side;
  }
  friend bool operator==(const FeatureArea& a, const FeatureArea& b) {
    return a.row == b.row && a.col == b.col && a.side == b.side;
  }
};

using AreaSet = std::vector<FeatureArea>;

/// Single-linkage clustering: points join a group when their Chebyshev
/// distance is <= radius (transitively).
std::vector<std::vector<FeaturePoint>> cluster_points(
    const FeaturePointSet& points, int radius);

/// Candidate square for one cluster: centered on the centroid, origin
/// snapped to the nearest multiple of side/2 and clamped inside the image.
FeatureArea snap_to_grid(const std::vector<FeaturePoint>& group, int side,
                         int img_width, int img_height);

/// Shannon entropy (bits) of the square's 256-level histogram.
double area_entropy(const GrayImage& img, const FeatureArea& area);

/// Drops candidates that intersect the border margin, then greedily keeps
/// the highest-entropy pairwise-disjoint candidates. Throws when fewer than
/// `count` survive. Candidates must already carry their entropy.
AreaSet select_areas(const std::vector<FeatureArea>& candidates, int count,
                     int img_width, int img_height, int border_margin);

/// Debug dump: "row,col,side,entropy" lines with a header.
std::string areas_csv(const AreaSet& areas);

}  // namespace wmark

#endif  // WMARK_AREAS_HPP
