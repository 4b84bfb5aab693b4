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

#ifndef WMARK_PIPELINE_HPP
#define WMARK_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "wmark/areas.hpp"
#include "wmark/daisy.hpp"
#include "wmark/histogram.hpp"
#include "wmark/metrics.hpp"

namespace wmark {

struct AreaParams {
  int side = 64;
  int margin = 16;          // border strip areas may not touch
  int cluster_radius = 16;  // single-linkage join distance
  int count = 5;            // areas carrying payload
};

/// Everything embed and extract share. The watermark length is
/// area count * bits_per_area; extraction needs the same config (and the
/// same master seed) that embedding used.
struct PipelineConfig {
  DaisyParams daisy;
  double keep_fraction = 0.02;
  AreaParams area;
  GroupingParams grouping;  // g_l = 6 -> 21 groups
  double strength = 6.0;    // S
  int bits_per_area = 9;    // N_L
  std::vector<std::uint8_t> master_seed = {0x00, 0x01, 0x02, 0x03,
                                           0x04, 0x05, 0x06, 0x07};
  // Original dimensions, carried so the extractor can undo scaling.
  // Zero means "unknown, skip normalization".
  int reference_width = 0;
  int reference_height = 0;

  int payload_bits() const { return area.count * bits_per_area; }
  void validate() const;
};

/// JSON round trip with stable field names; master_seed hex-encoded.
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const std::string& json_text);
PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& cfg, const std::string& path);

struct EmbedOutcome {
  GrayImage image;
  AreaSet areas;
  std::vector<ShiftReport> reports;
  QualityReport quality;  // psnr/ssim of watermarked vs original
};

/// Deterministic area detection (feature points -> clusters -> snapped,
/// entropy-ranked squares). Shared verbatim by embed and extract.
AreaSet detect_areas(const GrayImage& img, const PipelineConfig& cfg);

/// Embeds bits (length == cfg.payload_bits()): per detected area, denoise,
/// shift the area's bit slice into the smooth plane under its derived key,
/// re-add the residual and write the rounded square back.
EmbedOutcome embed(const GrayImage& img, const BitSequence& bits,
                   const PipelineConfig& cfg);

/// Decode-side scan: every interior square on the side/2 placement grid
/// with its per-group bin counts. Key application can then be repeated
/// cheaply without re-running the scan.
struct AreaAnalysis {
  AreaSet candidates;             // raster-ordered grid squares, overlapping
  std::vector<BinCounts> counts;  // one per candidate, all groups
};

AreaAnalysis analyze(const GrayImage& img, const PipelineConfig& cfg);

/// Reads the payload from an analysis. Each area index is matched to the
/// candidate square that decodes with the strongest bin-imbalance margin
/// under that index's key (greedy, assigned squares pairwise disjoint);
/// embedding drives its own areas' margins toward (S-1)/(S+1), far above
/// unmarked content, which makes the assignment robust to the entropy
/// drift embedding itself causes. Unassignable indexes decode as all-ones
/// (the tie convention).
BitSequence read_bits(const AreaAnalysis& analysis, const PipelineConfig& cfg);

/// Blind extraction: normalize scale (when reference dims are set), undo
/// estimated rotation, resolve the quarter-turn ambiguity by decode margin,
/// then read the bits.
BitSequence extract(const GrayImage& img, const PipelineConfig& cfg);

/// Estimated rotation angle in degrees, range (-45, 45]. Works from the
/// background wedges a rotation leaves along the frame edges: foreground
/// is thresholded against the fill value, the topmost foreground pixel of
/// each column is collected, and a line is fitted to the straight ramp
/// these edge points form. Returns 0 for images without a credible ramp.
double estimate_rotation(const GrayImage& img, std::uint8_t fill = 0);

/// Resamples to the reference dimensions when they differ (bilinear).
GrayImage normalize_geometry(const GrayImage& img, int reference_width,
                             int reference_height);

}  // namespace wmark

#endif  // WMARK_PIPELINE_HPP
