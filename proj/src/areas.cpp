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

#include "wmark/areas.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace wmark {

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<std::vector<FeaturePoint>> cluster_points(
    const FeaturePointSet& points, int radius) {
  if (points.empty()) throw Error("cluster_points: empty point set");
  if (radius < 0) throw Error("cluster_points: negative radius");

  const int n = static_cast<int>(points.size());
  Dsu dsu(points.size());

  // Bucket by radius-sized cells; only points in the 3x3 cell neighborhood
  // can be within Chebyshev distance `radius`.
  const int cell = std::max(radius, 1);
  std::map<std::pair<int, int>, std::vector<int>> buckets;
  for (int i = 0; i < n; ++i)
    buckets[{points[i].row / cell, points[i].col / cell}].push_back(i);

  for (const auto& [key, members] : buckets) {
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        auto it = buckets.find({key.first + dr, key.second + dc});
        if (it == buckets.end()) continue;
        for (int i : members) {
          for (int j : it->second) {
            if (j <= i) continue;
            const int cheb =
                std::max(std::abs(points[i].row - points[j].row),
                         std::abs(points[i].col - points[j].col));
            if (cheb <= radius) dsu.unite(i, j);
          }
        }
      }
    }
  }

  // Groups keyed by representative, ordered by first member appearance.
  std::vector<std::vector<FeaturePoint>> groups;
  std::map<int, std::size_t> slot;
  for (int i = 0; i < n; ++i) {
    const int root = dsu.find(i);
    auto [it, inserted] = slot.try_emplace(root, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(points[i]);
  }
  return groups;
}

FeatureArea snap_to_grid(const std::vector<FeaturePoint>& group, int side,
                         int img_width, int img_height) {
  if (group.empty()) throw Error("snap_to_grid: empty group");
  if (side <= 0 || side > img_width || side > img_height)
    throw Error("snap_to_grid: side does not fit image");

  double sum_r = 0.0, sum_c = 0.0;
  for (const auto& p : group) {
    sum_r += p.row;
    sum_c += p.col;
  }
  const double centroid_r = sum_r / static_cast<double>(group.size());
  const double centroid_c = sum_c / static_cast<double>(group.size());

  const double pitch = side / 2.0;
  auto snap = [&](double centroid, int limit) {
    const double origin = centroid - side / 2.0;
    const int snapped =
        static_cast<int>(std::lround(std::lround(origin / pitch) * pitch));
    return std::clamp(snapped, 0, limit - side);
  };

  FeatureArea area;
  area.row = snap(centroid_r, img_height);
  area.col = snap(centroid_c, img_width);
  area.side = side;
  return area;
}

double area_entropy(const GrayImage& img, const FeatureArea& area) {
  if (area.side <= 0 || area.row < 0 || area.col < 0 ||
      area.row + area.side > img.height || area.col + area.side > img.width)
    throw Error("area_entropy: area outside image");

  std::array<long, 256> hist{};
  for (int r = 0; r < area.side; ++r)
    for (int c = 0; c < area.side; ++c)
      ++hist[img.at(area.row + r, area.col + c)];

  const double total = static_cast<double>(area.side) * area.side;
  double h = 0.0;
  for (long count : hist) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / total;
    h -= p * std::log2(p);
  }
  return h;
}

AreaSet select_areas(const std::vector<FeatureArea>& candidates, int count,
                     int img_width, int img_height, int border_margin) {
  if (count < 1) throw Error("select_areas: count must be >= 1");

  std::vector<FeatureArea> interior;
  for (const auto& a : candidates) {
    if (a.row < border_margin || a.col < border_margin ||
        a.row + a.side > img_height - border_margin ||
        a.col + a.side > img_width - border_margin)
      continue;
    interior.push_back(a);
  }
  std::sort(interior.begin(), interior.end(),
            [](const FeatureArea& a, const FeatureArea& b) {
              if (a.entropy != b.entropy) return a.entropy > b.entropy;
              if (a.row != b.row) return a.row < b.row;
              return a.col < b.col;
            });

  AreaSet kept;
  for (const auto& a : interior) {
    bool clashes = false;
    for (const auto& k : kept)
      if (a.overlaps(k)) {
        clashes = true;
        break;
      }
    if (!clashes) kept.push_back(a);
  }
  if (static_cast<int>(kept.size()) < count)
    throw Error("insufficient feature areas: found " +
                std::to_string(kept.size()) + " of " + std::to_string(count));
  kept.resize(count);
  return kept;
}

std::string areas_csv(const AreaSet& areas) {
  std::ostringstream out;
  out << "row,col,side,entropy\n";
  for (const auto& a : areas)
    out << a.row << ',' << a.col << ',' << a.side << ',' << a.entropy << '\n';
  return out.str();
}

}  // namespace wmark
