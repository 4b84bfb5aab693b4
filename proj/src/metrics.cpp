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

#include "wmark/metrics.hpp"

#include <cmath>
#include <limits>

#include "wmark/rng.hpp"

namespace wmark {

BitSequence bits_from_string(const std::string& s) {
  BitSequence bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c == '0')
      bits.push_back(0);
    else if (c == '1')
      bits.push_back(1);
    else
      throw Error(std::string("invalid bit character '") + c + "'");
  }
  if (bits.empty()) throw Error("empty bit sequence");
  return bits;
}

std::string bits_to_string(const BitSequence& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

BitSequence random_bits(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  BitSequence bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
  return bits;
}

double mse(const GrayImage& a, const GrayImage& b) {
  if (!a.same_dims(b)) throw Error("psnr/mse: dimension mismatch");
  if (a.pixel_count() == 0) throw Error("psnr/mse: empty image");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.pixel_count());
}

double psnr(const GrayImage& a, const GrayImage& b) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

double ssim(const GrayImage& a, const GrayImage& b) {
  if (!a.same_dims(b)) throw Error("ssim: dimension mismatch");
  constexpr int kWin = 8;
  if (a.width < kWin || a.height < kWin)
    throw Error("ssim: image smaller than 8x8");
  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double c2 = (0.03 * 255.0) * (0.03 * 255.0);

  const int w = a.width, h = a.height;
  const int sw = w + 1, sh = h + 1;
  // Summed-area tables for a, b, a^2, b^2, a*b. All entries are integers
  // below 2^53, so doubles hold them exactly.
  std::vector<double> sa(static_cast<std::size_t>(sw) * sh, 0.0), sb = sa,
                      saa = sa, sbb = sa, sab = sa;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r + 1) * sw + (c + 1);
      const std::size_t up = i - sw, left = i - 1, diag = up - 1;
      const double av = a.at(r, c), bv = b.at(r, c);
      sa[i] = av + sa[up] + sa[left] - sa[diag];
      sb[i] = bv + sb[up] + sb[left] - sb[diag];
      saa[i] = av * av + saa[up] + saa[left] - saa[diag];
      sbb[i] = bv * bv + sbb[up] + sbb[left] - sbb[diag];
      sab[i] = av * bv + sab[up] + sab[left] - sab[diag];
    }
  }
  auto box = [&](const std::vector<double>& s, int r, int c) {
    const std::size_t i0 = static_cast<std::size_t>(r) * sw + c;
    const std::size_t i1 = static_cast<std::size_t>(r + kWin) * sw + c + kWin;
    const std::size_t ir = static_cast<std::size_t>(r) * sw + c + kWin;
    const std::size_t ib = static_cast<std::size_t>(r + kWin) * sw + c;
    return s[i1] - s[ir] - s[ib] + s[i0];
  };

  const double n = kWin * kWin;
  double total = 0.0;
  std::size_t windows = 0;
  for (int r = 0; r + kWin <= h; ++r) {
    for (int c = 0; c + kWin <= w; ++c) {
      const double mu_a = box(sa, r, c) / n;
      const double mu_b = box(sb, r, c) / n;
      const double var_a = box(saa, r, c) / n - mu_a * mu_a;
      const double var_b = box(sbb, r, c) / n - mu_b * mu_b;
      const double cov = box(sab, r, c) / n - mu_a * mu_b;
      const double num = (2 * mu_a * mu_b + c1) * (2 * cov + c2);
      const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
      total += num / den;
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

double ber(const BitSequence& sent, const BitSequence& received) {
  if (sent.size() != received.size()) throw Error("ber: length mismatch");
  if (sent.empty()) throw Error("ber: empty sequences");
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < sent.size(); ++i)
    if (sent[i] != received[i]) ++mismatches;
  return static_cast<double>(mismatches) / static_cast<double>(sent.size());
}

}  // namespace wmark
