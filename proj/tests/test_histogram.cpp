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
#include <map>

#include "support.hpp"
#include "wmark/histogram.hpp"
#include "wmark/rng.hpp"

using namespace wmark;

namespace {

// Independent oracle: smallest n for which the embedding inequality holds,
// found by scanning n upward. Multiplicative comparison avoids division.
long brute_force_shift(long count1, long count2, double S, int bit) {
  const long fav = bit ? count1 : count2;
  const long dis = bit ? count2 : count1;
  for (long n = 0; n <= dis; ++n) {
    if (static_cast<double>(fav + n) >= S * static_cast<double>(dis - n))
      return n;
  }
  return dis;
}

// Plane whose rounded values follow a prescribed level -> count histogram.
RealPlane plane_from_histogram(const std::map<int, long>& hist) {
  long total = 0;
  for (const auto& [level, count] : hist) total += count;
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(total))));
  RealPlane p(side, side, 255.0);  // filler sits in ungrouped territory
  std::size_t i = 0;
  for (const auto& [level, count] : hist)
    for (long k = 0; k < count; ++k) p.data[i++] = static_cast<double>(level);
  return p;
}

std::map<int, long> histogram_of(const RealPlane& p) {
  std::map<int, long> hist;
  for (double v : p.data)
    ++hist[static_cast<int>(std::lround(v))];
  return hist;
}

}  // namespace

TEST_CASE("grouping for the default parameters") {
  GroupingParams params;  // g_l = 6, 256 levels
  CHECK(params.bin_count() == 42);
  CHECK(params.group_count() == 21);

  const auto map = level_grouping(params);
  CHECK(map[0].group == 1);
  CHECK(map[0].bin == 1);
  CHECK(map[6].group == 1);
  CHECK(map[6].bin == 2);
  CHECK(map[12].group == 2);
  CHECK(map[12].bin == 1);
  // 21 groups cover levels 0..251; the top four levels stay ungrouped.
  for (int level = 252; level < 256; ++level) {
    CHECK(map[level].group == 0);
    CHECK(map[level].bin == 0);
  }
  CHECK(map[251].group == 21);
}

TEST_CASE("grouping rejects degenerate bin sizes") {
  GroupingParams params;
  params.levels_per_bin = 1;
  CHECK_THROWS_AS(level_grouping(params), Error);
}

TEST_CASE("derive_keys determinism, popcount and distinctness") {
  const std::vector<std::uint8_t> seed = {0xde, 0xad, 0xbe, 0xef};
  const auto keys = derive_keys(seed, 5, 21, 9);
  REQUIRE(keys.size() == 5);
  for (const auto& key : keys) {
    CHECK(key.size() == 21);
    int pop = 0;
    for (auto b : key) pop += b;
    CHECK(pop == 9);
  }
  // Deterministic.
  CHECK(derive_keys(seed, 5, 21, 9) == keys);
  // Pairwise distinct (overwhelmingly likely for independent permutations).
  for (std::size_t i = 0; i < keys.size(); ++i)
    for (std::size_t j = i + 1; j < keys.size(); ++j)
      CHECK(keys[i] != keys[j]);

  // N_L == G_n -> all-ones key.
  const auto full = derive_keys(seed, 1, 21, 21);
  for (auto b : full[0]) CHECK(b == 1);

  CHECK_THROWS_AS(derive_keys(seed, 1, 21, 22), Error);
}

TEST_CASE("required_shift worked examples") {
  // bit=1, counts (50, 100), S=6: ceil((600-50)/7) = 79.
  CHECK(required_shift(50, 100, 6.0, 1) == 79);
  // Post-shift ratio: (50+79)/(100-79) = 129/21 >= 6.
  CHECK(129.0 / 21.0 >= 6.0);
  // Inequality already satisfied.
  CHECK(required_shift(600, 100, 6.0, 1) == 0);
  // bit=0, counts (100, 0), S=2: ceil(200/3) = 67; 33/67 <= 1/2.
  CHECK(required_shift(100, 0, 2.0, 0) == 67);
}

TEST_CASE("required_shift equals the brute-force oracle") {
  Rng rng(2024);
  for (double S : {1.5, 2.0, 4.0, 6.0}) {
    for (int trial = 0; trial < 500; ++trial) {
      const long c1 = static_cast<long>(rng.below(10001));
      const long c2 = static_cast<long>(rng.below(10001));
      for (int bit : {0, 1}) {
        CAPTURE(c1);
        CAPTURE(c2);
        CAPTURE(S);
        CAPTURE(bit);
        CHECK(required_shift(c1, c2, S, bit) ==
              brute_force_shift(c1, c2, S, bit));
      }
    }
  }
}

TEST_CASE("extract_bit majority rule with tie conventions") {
  CHECK(extract_bit({10, 5}) == 1);
  CHECK(extract_bit({5, 10}) == 0);
  CHECK(extract_bit({7, 7}) == 1);
  CHECK(extract_bit({0, 0}) == 1);
}

TEST_CASE("embed_bit leaves a satisfied group untouched") {
  // Group 1, bit 1, bin1 already dominates.
  std::map<int, long> hist = {{2, 60}, {8, 5}};
  RealPlane p = plane_from_histogram(hist);
  const RealPlane before = p;
  GroupingParams params;
  const ShiftReport r = embed_bit(p, params, 1, 1, 6.0);
  CHECK(r.requested == 0);
  CHECK(r.achieved == 0);
  CHECK(p.data == before.data);
}

TEST_CASE("single donor level feeds the receiving level") {
  // All bin-1 pixels of group 1 sit at the top donor level g_6 (level 5);
  // for bit 0 they must land at the bin-2 receiving level g_10 (level 9),
  // a 4-level hop.
  GroupingParams params;
  std::map<int, long> hist = {{5, 100}, {9, 10}, {10, 7}};
  RealPlane p = plane_from_histogram(hist);
  const long n0 = required_shift(100, 17, 6.0, 0);

  const ShiftReport r = embed_bit(p, params, 1, 0, 6.0);
  CHECK(r.requested == n0);
  CHECK(r.achieved == n0);

  const auto after = histogram_of(p);
  CHECK(after.at(5) == 100 - n0);
  // The receiving level took n0 donors and pre-shifted min(N(9), n0)=10
  // pixels one level up to level 10.
  CHECK(after.at(9) == n0);
  CHECK(after.at(10) == 7 + 10);
  // Per-pixel change magnitude for these donors is exactly 4 levels.
  CHECK(r.post_ratio >= 6.0);
}

TEST_CASE("cascade drains donor levels outermost first") {
  GroupingParams params;
  // Group 1 bin 1 levels 0..5 populated sparsely; bit 0 with a demand that
  // forces the cascade into the deep donors.
  std::map<int, long> hist = {{0, 10}, {1, 10}, {2, 10}, {3, 10},
                              {4, 10}, {5, 10}, {9, 4}};
  RealPlane p = plane_from_histogram(hist);
  // counts: bin1=60, bin2=4. bit 0 => N0 = ceil((6*60-4)/7) = 51.
  const ShiftReport r = embed_bit(p, params, 1, 0, 6.0);
  CHECK(r.requested == 51);
  CHECK(r.achieved == 51);
  const auto after = histogram_of(p);
  // Drain order 5,4,3,2,1,0 with targets 9,9,8,7,6,6.
  CHECK(after.at(9) == 10 + 10);       // preshifted 4 away, received g6+g5
  CHECK(after.at(10) == 4);            // preshift landed here
  CHECK(after.at(8) == 10);            // g4 -> third level of bin 2
  CHECK(after.at(7) == 10);            // g3 -> second level
  CHECK(after.at(6) == 11);            // g2 (10) + 1 from g1
  CHECK(after.find(5) == after.end());
  CHECK(after.count(0) == 1);          // 9 of 10 left at level 0
  CHECK(after.at(0) == 9);
}

TEST_CASE("under-achievement is reported when the request exceeds donors") {
  GroupingParams params;
  std::map<int, long> hist = {{2, 5}, {8, 3}};
  RealPlane p = plane_from_histogram(hist);
  const long moved = transfer_pixels(p, params, 1, 0, 50);
  CHECK(moved == 5);  // all donors drained, cascade completes short
}

TEST_CASE("bit 1 mirrors the bit 0 cascade") {
  GroupingParams params;
  // Bin 2 of group 1 fully at its lowest level g_7 (level 6): bit 1 moves
  // them to the mirrored receiving level g_3 (level 2).
  std::map<int, long> hist = {{6, 80}, {2, 8}, {1, 3}};
  RealPlane p = plane_from_histogram(hist);
  const long n1 = required_shift(11, 80, 6.0, 1);
  const ShiftReport r = embed_bit(p, params, 1, 1, 6.0);
  CHECK(r.achieved == n1);
  const auto after = histogram_of(p);
  CHECK(after.at(6) == 80 - n1);
  CHECK(after.at(2) == n1);      // mirrored receiving level
  CHECK(after.at(1) == 3 + 8);   // mirrored pre-shift g_3 -> g_2
}

TEST_CASE("bounded modification: no pixel moves more than g_l levels") {
  GroupingParams params;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RealPlane p = test::random_plane(32, 32, seed, 0.0, 251.0);
    const RealPlane before = p;
    Rng rng(seed);
    const int group = 1 + static_cast<int>(rng.below(params.group_count()));
    const int bit = static_cast<int>(rng.below(2));
    embed_bit(p, params, group, bit, 6.0);
    for (std::size_t i = 0; i < p.data.size(); ++i)
      CHECK(std::abs(p.data[i] - before.data[i]) <=
            static_cast<double>(params.levels_per_bin) + 1e-9);
  }
}

TEST_CASE("conservation: embedding permutes levels, never pixel count") {
  GroupingParams params;
  RealPlane p = test::random_plane(64, 64, 77, 0.0, 251.0);
  const std::size_t before = p.data.size();
  embed_bit(p, params, 3, 0, 6.0);
  CHECK(p.data.size() == before);
}

TEST_CASE("embedding touches only the selected groups' level ranges") {
  GroupingParams params;
  RealPlane p = test::random_plane(64, 64, 123, 0.0, 251.0);
  const BinCounts before = count_bins(p, params);

  const std::vector<std::uint8_t> seed = {1, 2, 3};
  const auto key = derive_keys(seed, 1, params.group_count(), 9)[0];
  const BitSequence bits = random_bits(5, 9);
  embed_area(p, params, key, bits, 6.0);

  const BinCounts after = count_bins(p, params);
  for (int d = 0; d < params.group_count(); ++d) {
    if (key[d]) continue;
    CHECK(before[d].bin1 == after[d].bin1);
    CHECK(before[d].bin2 == after[d].bin2);
  }
}

TEST_CASE("embed then extract round trips on random planes") {
  GroupingParams params;
  const std::vector<std::uint8_t> seed = {9, 9, 9};
  int fully_achieved = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    RealPlane p = test::random_plane(64, 64, t + 4000, 0.0, 255.0);
    const auto key = derive_keys(seed, 1, params.group_count(), 9)[0];
    const BitSequence bits = random_bits(t, 9);
    const auto reports = embed_area(p, params, key, bits, 6.0);

    bool complete = true;
    for (const auto& r : reports) complete &= (r.achieved == r.requested);
    if (complete) ++fully_achieved;

    const BitSequence decoded = extract_area(p, params, key);
    if (complete) CHECK(decoded == bits);
  }
  // Uniform random planes always have enough donors.
  CHECK(fully_achieved == 100);
}

TEST_CASE("empty key embeds nothing") {
  GroupingParams params;
  RealPlane p = test::random_plane(16, 16, 1, 0.0, 251.0);
  const RealPlane before = p;
  const SecretKey key(params.group_count(), 0);
  const auto reports = embed_area(p, params, key, {}, 6.0);
  CHECK(reports.empty());
  CHECK(p.data == before.data);
}

TEST_CASE("embed_area rejects bit/key popcount mismatch") {
  GroupingParams params;
  RealPlane p(16, 16, 0.0);
  SecretKey key(params.group_count(), 0);
  key[0] = key[1] = 1;
  CHECK_THROWS_AS(embed_area(p, params, key, BitSequence(3, 1), 6.0), Error);
}

TEST_CASE("post-shift ratio honors the strength target") {
  GroupingParams params;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    RealPlane p = test::random_plane(48, 48, seed, 0.0, 251.0);
    for (int bit : {0, 1}) {
      RealPlane q = p;
      const ShiftReport r = embed_bit(q, params, 2, bit, 4.0);
      if (r.achieved == r.requested) CHECK(r.post_ratio >= 4.0);
    }
  }
}
