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

#ifndef WMARK_HISTOGRAM_HPP
#define WMARK_HISTOGRAM_HPP

#include <cstdint>
#include <vector>

#include "wmark/metrics.hpp"
#include "wmark/plane.hpp"

namespace wmark {

/// Partition of the gray scale into bins of `levels_per_bin` consecutive
/// levels; two adjacent bins form a group, the unit that carries one bit.
/// Group d (1-based) covers levels [2(d-1)*g_l, 2d*g_l - 1]; levels past
/// the last group belong to no group and are never touched.
struct GroupingParams {
  int levels_per_bin = 6;  // g_l
  int total_levels = 256;

  int bin_count() const { return total_levels / levels_per_bin; }
  int group_count() const { return bin_count() / 2; }
  int group_span() const { return 2 * levels_per_bin; }
  /// First absolute gray level of group d (1-based).
  int group_base(int d) const { return (d - 1) * group_span(); }
  void validate() const;
};

/// Where a gray level falls: group 0 means ungrouped.
struct LevelSlot {
  int group = 0;  // 1-based group index, 0 = ungrouped
  int bin = 0;    // 1 or 2 inside the group, 0 = ungrouped
};

/// Total mapping for levels 0..total_levels-1.
std::vector<LevelSlot> level_grouping(const GroupingParams& params);

/// Pixel populations of the two bins of one group.
struct GroupCounts {
  long bin1 = 0;
  long bin2 = 0;
};

/// Per-group bin populations of a smooth plane. A pixel's level is its
/// value rounded to nearest and clamped to [0, total_levels-1].
using BinCounts = std::vector<GroupCounts>;

BinCounts count_bins(const RealPlane& smooth, const GroupingParams& params);

/// Per-area group-selection key: one flag per group, popcount == bits
/// embedded in that area.
using SecretKey = std::vector<std::uint8_t>;

/// Seeded permutation of the group indices for one area; the key material
/// every group-selection decision is drawn from.
std::vector<int> group_priority(const std::vector<std::uint8_t>& master_seed,
                                int area_index, int group_count);

/// Derives one key per area from the master seed. Each key selects
/// `bits_per_area` groups via a seeded permutation of the group indices;
/// identical inputs always produce identical keys.
std::vector<SecretKey> derive_keys(const std::vector<std::uint8_t>& master_seed,
                                   int area_count, int group_count,
                                   int bits_per_area);

/// Key for one concrete area: walks the priority permutation and keeps the
/// first `bits_per_area` groups whose population reaches `min_population`
/// in `counts`. Gray levels a histogram never touches cannot carry a bit
/// (an empty group always reads as 1), so group selection is restricted
/// to populated groups; both embedder and extractor apply the same rule
/// to their own counts. Returns an empty key when the area cannot host
/// `bits_per_area` bits.
SecretKey adaptive_key(const std::vector<int>& priority,
                       const BinCounts& counts, int bits_per_area,
                       long min_population);

/// Minimal number of pixels to move toward the favored bin so that the
/// population ratio reaches the embedding target: bin1/bin2 >= S for bit 1,
/// <= 1/S for bit 0. Never exceeds the disfavored bin's population.
long required_shift(long count1, long count2, double S, int bit);

struct ShiftReport {
  int area_index = 0;
  int group = 0;
  int bit = 0;
  long requested = 0;
  long achieved = 0;
  double post_ratio = 0.0;  // favored / disfavored after the transfer
};

/// Moves up to `requested` pixels of the group's disfavored bin into the
/// favored bin following the staged transfer cascade (outermost donor
/// levels drain first; the receiving level pre-shifts one level deeper to
/// make room). Pixels inside one gray level move in raster order. Returns
/// the number actually moved.
long transfer_pixels(RealPlane& smooth, const GroupingParams& params, int group,
                     int bit, long requested);

/// required_shift + transfer_pixels + post-state report.
ShiftReport embed_bit(RealPlane& smooth, const GroupingParams& params,
                      int group, int bit, double S);

/// Bit read-out: 1 when bin1 >= bin2 (ties and empty groups decode as 1).
int extract_bit(const GroupCounts& counts);

/// Embeds bits[i] into the i-th key-selected group (ascending group index).
/// bits.size() must equal the key's popcount.
std::vector<ShiftReport> embed_area(RealPlane& smooth,
                                    const GroupingParams& params,
                                    const SecretKey& key,
                                    const BitSequence& bits, double S);

/// Reads one bit from every key-selected group, ascending.
BitSequence extract_area(const RealPlane& smooth, const GroupingParams& params,
                         const SecretKey& key);

/// Same read-out from precomputed counts (used when several keys are tried
/// against one analyzed plane).
BitSequence extract_area_counts(const BinCounts& counts, const SecretKey& key);

std::string shift_reports_csv(const std::vector<ShiftReport>& reports);

}  // namespace wmark

#endif  // WMARK_HISTOGRAM_HPP
