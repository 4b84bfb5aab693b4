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

#ifndef WMARK_BENCH_HPP
#define WMARK_BENCH_HPP

#include <string>
#include <vector>

#include "wmark/attacks.hpp"
#include "wmark/pipeline.hpp"

namespace wmark {

/// embed subcommand: watermark `input`, write `output` (PGM) plus a sidecar
/// JSON (config with reference dims, areas, shift reports, PSNR/SSIM).
/// Bits come from `bits` when nonempty, otherwise from wm_seed.
struct EmbedResult {
  BitSequence bits;
  QualityReport quality;
  std::string sidecar_path;
};
EmbedResult cmd_embed(const std::string& input, const std::string& output,
                      const std::string& bits, std::uint64_t wm_seed,
                      const PipelineConfig& cfg);

/// extract subcommand: returns the decoded bits; when `expected` is
/// nonempty also computes the BER against it.
struct ExtractResult {
  BitSequence bits;
  double ber = -1.0;  // negative when no expectation was given
};
ExtractResult cmd_extract(const std::string& input, const std::string& expected,
                          const PipelineConfig& cfg);

/// One benchmark sweep: every (image, attack parameter, strength, trial)
/// cell embeds seeded bits, applies the attack and extracts.
struct SweepSpec {
  std::string attack_family;         // e.g. "jpeg"
  std::string param_key;             // e.g. "quality"
  std::vector<double> param_values;  // grid
  std::vector<double> strengths;     // S grid
  std::vector<std::string> images;   // corpus paths
  int trials = 1;
  std::uint64_t seed = 1;
  std::string out_dir;
};

struct SweepOutput {
  std::string trials_csv_path;
  std::string aggregate_csv_path;
};

/// Runs all cells (concurrently) and writes two CSVs in deterministic
/// order: per-trial rows and per-(attack,param,S) aggregate means.
SweepOutput cmd_sweep(const SweepSpec& spec);

}  // namespace wmark

#endif  // WMARK_BENCH_HPP
