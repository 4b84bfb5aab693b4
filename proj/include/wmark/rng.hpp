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

#ifndef WMARK_RNG_HPP
#define WMARK_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace wmark {

// Deterministic generator with explicitly coded distributions so that
// identical seeds produce identical streams on every platform and
// standard-library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1) with 53-bit resolution.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal via Box-Muller (cached pair).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = unit(), u2 = unit();
    while (u1 <= 0.0) u1 = unit();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// FNV-1a over a byte string; used to derive 64-bit seeds from opaque keys.
inline std::uint64_t hash_bytes(const std::vector<std::uint8_t>& bytes,
                                std::uint64_t salt = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ salt;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  h ^= salt * 0x9e3779b97f4a7c15ULL;
  return h;
}

/// Parses a hex string ("a1b2...") into bytes; throws on odd length or
/// non-hex characters.
std::vector<std::uint8_t> parse_hex(const std::string& hex);
std::string to_hex(const std::vector<std::uint8_t>& bytes);

}  // namespace wmark

#endif  // WMARK_RNG_HPP
