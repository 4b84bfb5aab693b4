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

#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "wmark/daisy.hpp"

using namespace wmark;

TEST_CASE("constant image yields all-zero orientation maps") {
  const GrayImage img(16, 16, 77);
  const auto maps = orientation_maps(img, DaisyParams{});
  REQUIRE(maps.planes.size() == 8);
  for (const auto& plane : maps.planes)
    for (double v : plane.data) CHECK(v == 0.0);
}

TEST_CASE("vertical step edge excites only rightward orientations") {
  GrayImage img(16, 16, 0);
  for (int r = 0; r < 16; ++r)
    for (int c = 8; c < 16; ++c) img.at(r, c) = 255;
  DaisyParams params;
  const auto maps = orientation_maps(img, params);
  // dx > 0 along the edge, dy == 0: plane o responds iff cos(theta_o) > 0.
  for (int o = 0; o < params.orientations; ++o) {
    const double c = std::cos(2.0 * M_PI * o / params.orientations);
    double mass = 0.0;
    for (double v : maps.planes[o].data) mass += v;
    if (c > 1e-9)
      CHECK(mass > 0.0);
    else
      CHECK(mass == 0.0);
  }
}

TEST_CASE("horizontal ramp has constant central-difference response") {
  GrayImage img(5, 5);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) img.at(r, c) = static_cast<std::uint8_t>(10 * c);
  DaisyParams params;
  const auto maps = orientation_maps(img, params);
  // Interior columns: dx = 10 -> orientation 0 (cos=1) reads 10, the
  // opposite direction is rectified to zero.
  for (int r = 0; r < 5; ++r)
    for (int c = 1; c < 4; ++c) {
      CHECK(maps.planes[0].at(r, c) == doctest::Approx(10.0));
      CHECK(maps.planes[4].at(r, c) == 0.0);
    }
  // Replicate border halves the difference at the edges.
  CHECK(maps.planes[0].at(2, 0) == doctest::Approx(5.0));
}

TEST_CASE("images smaller than 3x3 are rejected") {
  CHECK_THROWS_AS(orientation_maps(GrayImage(2, 2, 0), DaisyParams{}), Error);
}

TEST_CASE("zero maps produce zero descriptors and zero scores") {
  const GrayImage img(32, 32, 5);
  DaisyParams params;
  DescriptorField field(orientation_maps(img, params), params);
  const auto entries = field.descriptor(16, 16);
  CHECK(entries.size() == 1 + 3 * 8);
  for (const auto& entry : entries) {
    CHECK(entry.size() == 8);
    for (double v : entry) CHECK(v == 0.0);
  }

  const auto points = directional_scores(field);
  REQUIRE(points.size() == 32 * 32);
  // All-zero scores: raster order via the (row, col) tie break.
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].score == 0.0);
    CHECK(points[i].row == static_cast<int>(i / 32));
    CHECK(points[i].col == static_cast<int>(i % 32));
  }
}

TEST_CASE("impulse response matches the analytic gaussian") {
  // One impulse in orientation plane 0; ring samples must read the
  // normalized truncated Gaussian evaluated at their distance from it.
  DaisyParams params;
  OrientationMaps maps;
  maps.width = 64;
  maps.height = 64;
  for (int o = 0; o < params.orientations; ++o)
    maps.planes.emplace_back(64, 64, 0.0);
  const int ir = 32, ic = 32;
  maps.planes[0].at(ir, ic) = 1.0;

  DescriptorField field(std::move(maps), params);
  const auto entries = field.descriptor(ir, ic);

  for (int l = 0; l < params.layers; ++l) {
    const double sigma = params.ring_sigma(l + 1);
    // Oracle: outer product of the normalized 1-D taps (same truncation).
    const auto taps = gaussian_kernel(sigma);
    const int radius = static_cast<int>(taps.size() / 2);
    for (int t = 0; t < params.directions; ++t) {
      const auto [dr, dc] = field.sample_offset(l, t);
      const double expected =
          (std::abs(dr) <= radius && std::abs(dc) <= radius)
              ? taps[dr + radius] * taps[dc + radius]
              : 0.0;
      const double got = entries[1 + l * params.directions + t][0];
      CHECK(got == doctest::Approx(expected).epsilon(1e-9));
      // And it approximates the untruncated Gaussian itself.
      const double dist2 = static_cast<double>(dr) * dr +
                           static_cast<double>(dc) * dc;
      const double analytic =
          std::exp(-0.5 * dist2 / (sigma * sigma)) / (2.0 * M_PI * sigma * sigma);
      CHECK(got == doctest::Approx(analytic).epsilon(2e-3));
    }
  }
}

TEST_CASE("border descriptors are finite (samples clamp)") {
  const GrayImage img = test::random_image(40, 40, 3);
  DaisyParams params;
  DescriptorField field(orientation_maps(img, params), params);
  for (auto [r, c] : {std::pair{0, 0}, {0, 39}, {39, 0}, {39, 39}}) {
    for (const auto& entry : field.descriptor(r, c))
      for (double v : entry) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
      }
  }
}

TEST_CASE("orientation maps stay rectified on random images") {
  const GrayImage img = test::random_image(48, 32, 12);
  const auto maps = orientation_maps(img, DaisyParams{});
  for (const auto& plane : maps.planes)
    for (double v : plane.data) CHECK(v >= 0.0);
}

TEST_CASE("a pixel with the only gradient energy ranks first") {
  GrayImage img(33, 33, 100);
  img.at(16, 16) = 255;  // lone bright dot
  DaisyParams params;
  DescriptorField field(orientation_maps(img, params), params);
  const auto points = directional_scores(field);
  // The top point must sit within the dot's smoothed footprint.
  CHECK(std::abs(points[0].row - 16) <= static_cast<int>(params.radius));
  CHECK(std::abs(points[0].col - 16) <= static_cast<int>(params.radius));
  CHECK(points[0].score > 0.0);
}

TEST_CASE("textured patch outranks flat patch everywhere") {
  // Left half: strong checkered texture; right half: constant. Any pixel
  // whose ring support stays inside the textured half must outrank every
  // pixel whose support stays in the flat half.
  GrayImage img(64, 64, 128);
  Rng rng(5);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 28; ++c)
      img.at(r, c) = static_cast<std::uint8_t>(rng.below(256));

  DaisyParams params;
  DescriptorField field(orientation_maps(img, params), params);
  const auto points = directional_scores(field);

  std::vector<double> score(64 * 64);
  for (const auto& p : points) score[p.row * 64 + p.col] = p.score;

  double min_textured = 1e300, max_flat = -1e300;
  for (int r = 20; r < 44; ++r) {
    for (int c = 4; c < 8; ++c)
      min_textured = std::min(min_textured, score[r * 64 + c]);
    for (int c = 56; c < 60; ++c)
      max_flat = std::max(max_flat, score[r * 64 + c]);
  }
  CHECK(min_textured > max_flat);
}

TEST_CASE("select_points keeps the requested fraction") {
  const GrayImage img = test::random_image(32, 32, 21);
  DaisyParams params;
  DescriptorField field(orientation_maps(img, params), params);
  const auto points = directional_scores(field);

  CHECK(select_points(points, 1.0).size() == points.size());
  const auto half = select_points(points, 0.5);
  CHECK(half.size() == (points.size() + 1) / 2);
  CHECK_THROWS_AS(select_points(points, 0.0), Error);
  CHECK_THROWS_AS(select_points({}, 0.5), Error);
}

TEST_CASE("equal scores select in raster order") {
  const GrayImage img(16, 16, 9);  // constant -> all scores zero
  DaisyParams params;
  DescriptorField field(orientation_maps(img, params), params);
  const auto half = select_points(directional_scores(field), 0.5);
  REQUIRE(half.size() == 128);
  CHECK(half.front().row == 0);
  CHECK(half.front().col == 0);
  CHECK(half.back().row == 7);
  CHECK(half.back().col == 15);
}

TEST_CASE("detection is deterministic") {
  const GrayImage img = test::random_image(48, 48, 31);
  DaisyParams params;
  auto run = [&] {
    DescriptorField field(orientation_maps(img, params), params);
    return select_points(directional_scores(field), 0.02);
  };
  const auto a = run(), b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].row == b[i].row);
    CHECK(a[i].col == b[i].col);
    CHECK(a[i].score == b[i].score);
  }
}
