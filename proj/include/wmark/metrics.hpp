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

#ifndef WMARK_METRICS_HPP
#define WMARK_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "wmark/image.hpp"

namespace wmark {

/// Ordered watermark payload; every element is 0 or 1.
using BitSequence = std::vector<std::uint8_t>;

BitSequence bits_from_string(const std::string& s);   // "0101..."
std::string bits_to_string(const BitSequence& bits);
BitSequence random_bits(std::uint64_t seed, std::size_t n);

struct QualityReport {
  double psnr = 0.0;  // dB; +infinity when the images are identical
  double ssim = 0.0;
  double ber = 0.0;
};

/// Mean squared error over all pixels. Dimensions must match.
double mse(const GrayImage& a, const GrayImage& b);

/// 10*log10(255^2 / MSE); +infinity for identical inputs.
double psnr(const GrayImage& a, const GrayImage& b);

/// Mean structural similarity over all 8x8 windows (stride 1, uniform
/// weights), stabilizers C1=(0.01*255)^2 and C2=(0.03*255)^2. Inputs must
/// share dimensions and be at least 8x8.
double ssim(const GrayImage& a, const GrayImage& b);

/// Fraction of positions where the sequences disagree. Lengths must match.
double ber(const BitSequence& sent, const BitSequence& received);

}  // namespace wmark

#endif  // WMARK_METRICS_HPP
