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

#include "wmark/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "wmark/plane.hpp"
#include "wmark/rng.hpp"

namespace wmark {

namespace {

// Bilinearly interpolated lattice of seeded random values in [0,1].
RealPlane value_noise(int width, int height, int spacing, Rng& rng) {
  const int gw = width / spacing + 2, gh = height / spacing + 2;
  std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
  for (auto& v : grid) v = rng.unit();
  RealPlane out(width, height);
  for (int r = 0; r < height; ++r) {
    const double gr = static_cast<double>(r) / spacing;
    const int r0 = static_cast<int>(gr);
    const double fr = gr - r0;
    for (int c = 0; c < width; ++c) {
      const double gc = static_cast<double>(c) / spacing;
      const int c0 = static_cast<int>(gc);
      const double fc = gc - c0;
      const double v00 = grid[static_cast<std::size_t>(r0) * gw + c0];
      const double v01 = grid[static_cast<std::size_t>(r0) * gw + c0 + 1];
      const double v10 = grid[static_cast<std::size_t>(r0 + 1) * gw + c0];
      const double v11 = grid[static_cast<std::size_t>(r0 + 1) * gw + c0 + 1];
      out.at(r, c) = (1 - fr) * ((1 - fc) * v00 + fc * v01) +
                     fr * ((1 - fc) * v10 + fc * v11);
    }
  }
  return out;
}

}  // namespace

GrayImage synth_image(int width, int height, std::uint64_t seed, int variant) {
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + variant + 1);
  RealPlane canvas(width, height);

  // Smooth illumination: sky-like gradient with a broad diagonal tilt.
  const double tilt = 0.2 + 0.6 * rng.unit();
  const double top_level = 140.0 + 80.0 * rng.unit();
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      canvas.at(r, c) = top_level - (60.0 + 40.0 * tilt) * r / height +
                        18.0 * tilt * c / width;

  // Texture mask: quiet in the top band, active below, with soft edges.
  RealPlane mask(width, height);
  RealPlane mask_noise = value_noise(width, height, 96, rng);
  const double band = 0.22 + 0.10 * rng.unit();
  for (int r = 0; r < height; ++r) {
    const double depth = static_cast<double>(r) / height;
    const double ramp = std::clamp((depth - band) / 0.12, 0.0, 1.0);
    for (int c = 0; c < width; ++c)
      mask.at(r, c) = ramp * (0.45 + 0.55 * mask_noise.at(r, c));
  }

  // Multi-octave value noise carries the texture.
  RealPlane texture(width, height);
  double amp = 1.0, total_amp = 0.0;
  for (int spacing : {64, 32, 16, 8, 4}) {
    RealPlane octave = value_noise(width, height, spacing, rng);
    for (std::size_t i = 0; i < texture.data.size(); ++i)
      texture.data[i] += amp * (octave.data[i] - 0.5);
    total_amp += amp;
    amp *= 0.55;
  }
  for (double& v : texture.data) v /= total_amp;

  const double texture_gain = 150.0 + 110.0 * rng.unit();
  for (std::size_t i = 0; i < canvas.data.size(); ++i)
    canvas.data[i] += texture_gain * mask.data[i] * texture.data[i];

  // Per-variant large structure below the quiet band.
  const int structures = 4 + static_cast<int>(rng.below(4));
  for (int s = 0; s < structures; ++s) {
    const int kind = (variant + s) % 3;
    const double cr = height * (band + 0.1 + 0.6 * rng.unit());
    const double cc = width * rng.unit();
    const double size = 24.0 + 56.0 * rng.unit();
    const double level = 30.0 + 200.0 * rng.unit();
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        bool hit = false;
        if (kind == 0) {  // disk
          const double d = std::hypot(r - cr, c - cc);
          hit = d < size;
        } else if (kind == 1) {  // bar
          hit = std::abs(r - cr) < size * 0.25 && std::abs(c - cc) < size * 2;
        } else {  // diagonal stripe
          hit = std::abs((r - cr) - 0.7 * (c - cc)) < size * 0.2;
        }
        if (hit) canvas.at(r, c) = 0.65 * canvas.at(r, c) + 0.35 * level;
      }
    }
  }
  return to_image(canvas);
}

std::vector<std::string> write_synthetic_corpus(const std::string& dir,
                                                int count, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> paths;
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "synth_%02d.pgm", i);
    const std::string path = (fs::path(dir) / name).string();
    save_pgm(synth_image(512, 512, seed, i), path);
    paths.push_back(path);
  }
  return paths;
}

std::vector<std::string> list_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  if (!fs::is_directory(dir)) return paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".pgm" || ext == ".png") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

}  // namespace wmark
