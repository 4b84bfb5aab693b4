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

#ifndef WMARK_ATTACKS_HPP
#define WMARK_ATTACKS_HPP

#include <cstdint>
#include <string>
#include <variant>

#include "wmark/image.hpp"

namespace wmark {

// Every stochastic attack carries its own seed; identical spec -> identical
// output, always.

struct GaussianNoiseAttack {
  double sigma = 3.0;
  std::uint64_t seed = 1;
};
struct SaltPepperAttack {
  double density = 0.02;
  std::uint64_t seed = 1;
};
struct MedianFilterAttack {
  int kernel = 3;  // odd, >= 3
};
struct GaussianFilterAttack {
  double sigma = 0.8;
  int kernel = 3;  // odd, >= 3
};
struct CropAttack {
  double fraction = 0.1;  // top strip of ceil(fraction*height) rows zeroed
};
struct ScaleAttack {
  double factor = 0.8;  // output dims = round(dim * factor)
};
struct RotateAttack {
  double degrees = 10.0;
  std::uint8_t fill = 0;  // background for samples outside the source
};
struct JpegAttack {
  int quality = 70;  // 1..100, baseline codec
};
struct WaveBendAttack {
  double amplitude = 3.0;  // px
  double period = 64.0;    // px
};
struct RandomBendAttack {
  double disp_sigma = 1.5;    // RMS displacement after smoothing, px
  double smooth_sigma = 8.0;  // smoothing of the displacement field, px
  std::uint64_t seed = 1;
};
struct JitterAttack {
  int count = 8;  // columns removed; width restored by edge replication
  std::uint64_t seed = 1;
};

using AttackSpec =
    std::variant<GaussianNoiseAttack, SaltPepperAttack, MedianFilterAttack,
                 GaussianFilterAttack, CropAttack, ScaleAttack, RotateAttack,
                 JpegAttack, WaveBendAttack, RandomBendAttack, JitterAttack>;

/// Applies one distortion. Dimensions are preserved by every variant
/// except Scale.
GrayImage apply_attack(const GrayImage& img, const AttackSpec& spec);

/// Rotation about the image center with bilinear sampling, dims preserved.
/// Exposed separately because extraction uses it to undo estimated angles.
GrayImage rotate_image(const GrayImage& img, double degrees,
                       std::uint8_t fill);

/// Lossless quarter-turn rotation, k in {0,1,2,3} (k*90 degrees).
GrayImage rotate90(const GrayImage& img, int k);

/// Bilinear resample to exact target dimensions.
GrayImage resize_bilinear(const GrayImage& img, int out_width, int out_height);

/// JPEG round trip in memory at the given quality.
GrayImage jpeg_cycle(const GrayImage& img, int quality);

/// String form "family:key=value,...", e.g. "jpeg:quality=70" or
/// "gaussian_noise:sigma=3,seed=7". Keys may be omitted to take defaults.
AttackSpec parse_attack(const std::string& text);
std::string attack_to_string(const AttackSpec& spec);
std::string attack_family(const AttackSpec& spec);

/// JSON object round trip ({"family": ..., parameters...}).
std::string attack_to_json(const AttackSpec& spec);
AttackSpec attack_from_json(const std::string& json_text);

}  // namespace wmark

#endif  // WMARK_ATTACKS_HPP
