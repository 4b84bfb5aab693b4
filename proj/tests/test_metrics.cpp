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
#include <limits>

#include "support.hpp"
#include "wmark/metrics.hpp"

using namespace wmark;

TEST_CASE("psnr of identical images is the infinite sentinel") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const GrayImage img = test::random_image(16, 16, seed);
    CHECK(std::isinf(psnr(img, img)));
  }
}

TEST_CASE("psnr of maximal difference is 0 dB") {
  const GrayImage black(8, 8, 0), white(8, 8, 255);
  CHECK(psnr(black, white) == doctest::Approx(0.0));
}

TEST_CASE("psnr of a single off-by-one pixel in 512x512") {
  GrayImage a(512, 512, 100), b = a;
  b.at(100, 200) = 101;
  // Oracle: direct MSE substitution.
  const double expected_mse = 1.0 / (512.0 * 512.0);
  const double expected = 10.0 * std::log10(255.0 * 255.0 / expected_mse);
  CHECK(psnr(a, b) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(psnr(a, b) == doctest::Approx(102.31).epsilon(1e-3));
}

TEST_CASE("psnr is symmetric and rejects dimension mismatch") {
  const GrayImage a = test::random_image(20, 10, 4);
  const GrayImage b = test::random_image(20, 10, 5);
  CHECK(psnr(a, b) == doctest::Approx(psnr(b, a)).epsilon(1e-12));
  CHECK_THROWS_AS(psnr(a, test::random_image(10, 20, 6)), Error);
}

TEST_CASE("ssim of identical images is exactly one") {
  const GrayImage img = test::random_image(32, 24, 7);
  CHECK(ssim(img, img) == 1.0);
}

TEST_CASE("ssim of constant planes matches the closed form") {
  const GrayImage a(16, 16, 128), b(16, 16, 0);
  // All windows identical: mu_a=128, mu_b=0, all variances zero.
  const double c1 = 6.5025, c2 = 58.5225;
  const double expected = (c1 * c2) / ((128.0 * 128.0 + c1) * c2);
  CHECK(ssim(a, b) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ssim input validation") {
  const GrayImage small(4, 4, 0);
  CHECK_THROWS_AS(ssim(small, small), Error);
  CHECK_THROWS_AS(
      ssim(test::random_image(16, 16, 1), test::random_image(16, 8, 1)),
      Error);
}

TEST_CASE("ber counts mismatches") {
  const BitSequence sent = random_bits(11, 45);
  CHECK(ber(sent, sent) == 0.0);

  BitSequence flipped = sent;
  for (auto& b : flipped) b ^= 1;
  CHECK(ber(sent, flipped) == 1.0);

  BitSequence one_off = sent;
  one_off[17] ^= 1;
  CHECK(ber(sent, one_off) == doctest::Approx(1.0 / 45.0));

  CHECK_THROWS_AS(ber(sent, BitSequence(44, 0)), Error);
}

TEST_CASE("ber stays in [0,1] for random pairs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const BitSequence a = random_bits(seed, 64);
    const BitSequence b = random_bits(seed + 100, 64);
    const double v = ber(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("bit string round trip") {
  const BitSequence bits = bits_from_string("0110101");
  CHECK(bits_to_string(bits) == "0110101");
  CHECK_THROWS_AS(bits_from_string("012"), Error);
  CHECK_THROWS_AS(bits_from_string(""), Error);
}
