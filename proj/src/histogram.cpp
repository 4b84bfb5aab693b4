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

#include "wmark/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wmark/rng.hpp"

namespace wmark {

namespace {

int value_level(double v, int total_levels) {
  const long r = std::lround(v);
  return static_cast<int>(std::clamp(r, 0L, static_cast<long>(total_levels - 1)));
}

// One leg of the transfer cascade: move up to `want` snapshot pixels from
// absolute level `from` to absolute level `to`.
struct LevelPool {
  std::vector<std::vector<std::size_t>> at_level;  // raster-ordered indices
  std::vector<std::size_t> used;                   // consumed prefix length
};

LevelPool snapshot_levels(const RealPlane& plane, const GroupingParams& params) {
  LevelPool pool;
  pool.at_level.resize(params.total_levels);
  pool.used.assign(params.total_levels, 0);
  for (std::size_t i = 0; i < plane.data.size(); ++i)
    pool.at_level[value_level(plane.data[i], params.total_levels)].push_back(i);
  return pool;
}

long move_pixels(RealPlane& plane, LevelPool& pool, int from, int to,
                 long want) {
  if (want <= 0 || from == to) return 0;
  auto& src = pool.at_level[from];
  std::size_t& used = pool.used[from];
  const long avail = static_cast<long>(src.size() - used);
  const long n = std::min(want, avail);
  const double delta = static_cast<double>(to - from);
  for (long k = 0; k < n; ++k) plane.data[src[used + k]] += delta;
  used += static_cast<std::size_t>(n);
  return n;
}

}  // namespace

void GroupingParams::validate() const {
  if (levels_per_bin < 2) throw Error("grouping: levels_per_bin must be >= 2");
  if (total_levels < 2 * levels_per_bin)
    throw Error("grouping: not enough gray levels for one group");
}

std::vector<LevelSlot> level_grouping(const GroupingParams& params) {
  params.validate();
  std::vector<LevelSlot> map(params.total_levels);
  const int span = params.group_span();
  const int grouped = params.group_count() * span;
  for (int level = 0; level < grouped; ++level) {
    map[level].group = level / span + 1;
    map[level].bin = (level % span) < params.levels_per_bin ? 1 : 2;
  }
  return map;
}

BinCounts count_bins(const RealPlane& smooth, const GroupingParams& params) {
  params.validate();
  BinCounts counts(params.group_count());
  const int span = params.group_span();
  const int grouped = params.group_count() * span;
  for (double v : smooth.data) {
    const int level = value_level(v, params.total_levels);
    if (level >= grouped) continue;
    GroupCounts& gc = counts[level / span];
    if ((level % span) < params.levels_per_bin)
      ++gc.bin1;
    else
      ++gc.bin2;
  }
  return counts;
}

std::vector<int> group_priority(const std::vector<std::uint8_t>& master_seed,
                                int area_index, int group_count) {
  Rng rng(hash_bytes(master_seed, static_cast<std::uint64_t>(area_index) + 1));
  std::vector<int> perm(group_count);
  for (int i = 0; i < group_count; ++i) perm[i] = i;
  for (int i = group_count - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

std::vector<SecretKey> derive_keys(const std::vector<std::uint8_t>& master_seed,
                                   int area_count, int group_count,
                                   int bits_per_area) {
  if (bits_per_area > group_count)
    throw Error("derive_keys: more bits than groups per area");
  if (bits_per_area < 0 || area_count < 0)
    throw Error("derive_keys: negative counts");
  std::vector<SecretKey> keys;
  keys.reserve(area_count);
  for (int area = 0; area < area_count; ++area) {
    const std::vector<int> perm = group_priority(master_seed, area, group_count);
    SecretKey key(group_count, 0);
    for (int i = 0; i < bits_per_area; ++i) key[perm[i]] = 1;
    keys.push_back(std::move(key));
  }
  return keys;
}

SecretKey adaptive_key(const std::vector<int>& priority,
                       const BinCounts& counts, int bits_per_area,
                       long min_population) {
  if (priority.size() != counts.size())
    throw Error("adaptive_key: priority/counts size mismatch");
  SecretKey key(counts.size(), 0);
  int chosen = 0;
  for (int group : priority) {
    if (chosen == bits_per_area) break;
    const GroupCounts& gc = counts[group];
    if (gc.bin1 + gc.bin2 < min_population) continue;
    key[group] = 1;
    ++chosen;
  }
  if (chosen < bits_per_area) return {};
  return key;
}

long required_shift(long count1, long count2, double S, int bit) {
  if (count1 < 0 || count2 < 0) throw Error("required_shift: negative counts");
  if (S < 1.0) throw Error("required_shift: strength must be >= 1");
  // After moving n pixels toward the favored bin the condition is
  //   bit 1: count1 + n >= S * (count2 - n)
  //   bit 0: count2 + n >= S * (count1 - n)
  const long fav = bit ? count1 : count2;
  const long dis = bit ? count2 : count1;
  auto satisfied = [&](long n) {
    return static_cast<double>(fav + n) >= S * static_cast<double>(dis - n);
  };
  double est = (S * static_cast<double>(dis) - static_cast<double>(fav)) / (S + 1.0);
  long n = std::max(0L, static_cast<long>(std::ceil(est)));
  n = std::min(n, dis);
  while (n > 0 && satisfied(n - 1)) --n;
  while (n < dis && !satisfied(n)) ++n;
  return n;
}

long transfer_pixels(RealPlane& smooth, const GroupingParams& params, int group,
                     int bit, long requested) {
  params.validate();
  if (group < 1 || group > params.group_count())
    throw Error("transfer_pixels: group out of range");
  if (requested <= 0) return 0;

  const int gl = params.levels_per_bin;
  const int base = params.group_base(group);
  const int span = params.group_span();
  // Canonical indices describe the bit-0 direction (bin 1 drains into
  // bin 2); bit 1 runs the mirror image across the group midline.
  auto abs_level = [&](int canonical) {
    return base + (bit ? span - 1 - canonical : canonical);
  };

  LevelPool pool = snapshot_levels(smooth, params);

  // Receiving level sits two levels below the top of bin 2; it pre-shifts
  // one level deeper to make room for the incoming pixels.
  const int recv_bin_idx = std::max(1, gl - 2);
  const int recv_idx = gl + recv_bin_idx - 1;
  const int preshift_idx = gl + std::min(gl, recv_bin_idx + 1) - 1;
  if (preshift_idx != recv_idx)
    move_pixels(smooth, pool, abs_level(recv_idx), abs_level(preshift_idx),
                requested);

  long moved = 0;
  for (int j = gl; j >= 1 && moved < requested; --j) {
    const int donor_idx = j - 1;
    const int target_bin_idx =
        std::clamp(std::min(gl - 2, std::max(1, j - 1)), 1, gl);
    const int target_idx = gl + target_bin_idx - 1;
    moved += move_pixels(smooth, pool, abs_level(donor_idx),
                         abs_level(target_idx), requested - moved);
  }
  return moved;
}

ShiftReport embed_bit(RealPlane& smooth, const GroupingParams& params,
                      int group, int bit, double S) {
  const BinCounts before = count_bins(smooth, params);
  const GroupCounts& gc = before[group - 1];
  ShiftReport report;
  report.group = group;
  report.bit = bit;
  report.requested = required_shift(gc.bin1, gc.bin2, S, bit);
  report.achieved = transfer_pixels(smooth, params, group, bit, report.requested);

  const BinCounts after = count_bins(smooth, params);
  const GroupCounts& ac = after[group - 1];
  const double fav = static_cast<double>(bit ? ac.bin1 : ac.bin2);
  const double dis = static_cast<double>(bit ? ac.bin2 : ac.bin1);
  report.post_ratio =
      dis == 0.0 ? std::numeric_limits<double>::infinity() : fav / dis;
  return report;
}

int extract_bit(const GroupCounts& counts) {
  return counts.bin1 >= counts.bin2 ? 1 : 0;
}

std::vector<ShiftReport> embed_area(RealPlane& smooth,
                                    const GroupingParams& params,
                                    const SecretKey& key,
                                    const BitSequence& bits, double S) {
  params.validate();
  if (static_cast<int>(key.size()) != params.group_count())
    throw Error("embed_area: key length != group count");
  std::size_t popcount = 0;
  for (auto k : key) popcount += (k != 0);
  if (popcount != bits.size())
    throw Error("embed_area: bit count != key popcount");

  std::vector<ShiftReport> reports;
  reports.reserve(bits.size());
  std::size_t next = 0;
  for (int d = 1; d <= params.group_count(); ++d) {
    if (!key[d - 1]) continue;
    reports.push_back(embed_bit(smooth, params, d, bits[next], S));
    ++next;
  }
  return reports;
}

BitSequence extract_area_counts(const BinCounts& counts, const SecretKey& key) {
  if (key.size() != counts.size())
    throw Error("extract_area: key length != group count");
  BitSequence bits;
  for (std::size_t d = 0; d < key.size(); ++d)
    if (key[d]) bits.push_back(static_cast<std::uint8_t>(extract_bit(counts[d])));
  return bits;
}

BitSequence extract_area(const RealPlane& smooth, const GroupingParams& params,
                         const SecretKey& key) {
  return extract_area_counts(count_bins(smooth, params), key);
}

std::string shift_reports_csv(const std::vector<ShiftReport>& reports) {
  std::ostringstream out;
  out << "area,group,bit,requested,achieved,ratio\n";
  for (const auto& r : reports) {
    out << r.area_index << ',' << r.group << ',' << r.bit << ','
        << r.requested << ',' << r.achieved << ',';
    if (std::isinf(r.post_ratio))
      out << "inf";
    else
      out << r.post_ratio;
    out << '\n';
  }
  return out.str();
}

}  // namespace wmark
