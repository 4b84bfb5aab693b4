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

#include "wmark/bench.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wmark/parallel.hpp"
#include "wmark/rng.hpp"

namespace wmark {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

EmbedResult cmd_embed(const std::string& input, const std::string& output,
                      const std::string& bits_text, std::uint64_t wm_seed,
                      const PipelineConfig& cfg_in) {
  GrayImage img = load_image(input);

  PipelineConfig cfg = cfg_in;
  cfg.reference_width = img.width;
  cfg.reference_height = img.height;

  BitSequence bits = bits_text.empty()
                         ? random_bits(wm_seed, cfg.payload_bits())
                         : bits_from_string(bits_text);
  EmbedOutcome outcome = embed(img, bits, cfg);
  save_pgm(outcome.image, output);

  nlohmann::json sidecar;
  sidecar["config"] = nlohmann::json::parse(config_to_json(cfg));
  sidecar["bits"] = bits_to_string(bits);
  sidecar["psnr"] = outcome.quality.psnr;
  sidecar["ssim"] = outcome.quality.ssim;
  sidecar["areas"] = nlohmann::json::array();
  for (const auto& a : outcome.areas)
    sidecar["areas"].push_back({{"row", a.row},
                                {"col", a.col},
                                {"side", a.side},
                                {"entropy", a.entropy}});
  sidecar["shift_reports"] = nlohmann::json::array();
  for (const auto& r : outcome.reports)
    sidecar["shift_reports"].push_back(
        {{"area", r.area_index},
         {"group", r.group},
         {"bit", r.bit},
         {"requested", r.requested},
         {"achieved", r.achieved},
         {"ratio", std::isinf(r.post_ratio) ? -1.0 : r.post_ratio}});

  EmbedResult result;
  result.bits = bits;
  result.quality = outcome.quality;
  result.sidecar_path = output + ".json";
  std::ofstream side(result.sidecar_path, std::ios::trunc);
  if (!side) throw Error("cannot write sidecar: " + result.sidecar_path);
  side << sidecar.dump(2) << '\n';
  return result;
}

ExtractResult cmd_extract(const std::string& input, const std::string& expected,
                          const PipelineConfig& cfg) {
  GrayImage img = load_image(input);
  ExtractResult result;
  result.bits = extract(img, cfg);
  if (!expected.empty())
    result.ber = ber(bits_from_string(expected), result.bits);
  return result;
}

namespace {

struct SweepRow {
  std::string image;
  std::string attack;
  double param = 0.0;
  double strength = 0.0;
  double ber_value = 0.0;
  double psnr_value = 0.0;
  double ssim_value = 0.0;
  bool ok = true;
};

AttackSpec make_attack(const SweepSpec& spec, double param,
                       std::uint64_t cell_seed) {
  std::ostringstream text;
  text << spec.attack_family << ':' << spec.param_key << '=' << param;
  const std::string& f = spec.attack_family;
  if (f == "gaussian_noise" || f == "salt_pepper" || f == "random_bend" ||
      f == "jitter")
    text << ",seed=" << cell_seed;
  return parse_attack(text.str());
}

}  // namespace

SweepOutput cmd_sweep(const SweepSpec& spec) {
  if (spec.images.empty()) throw Error("sweep: empty image corpus");
  if (spec.param_values.empty()) throw Error("sweep: empty parameter grid");
  if (spec.strengths.empty()) throw Error("sweep: empty strength grid");
  if (spec.trials < 1) throw Error("sweep: trials must be >= 1");
  if (spec.out_dir.empty()) throw Error("sweep: output directory required");
  // Fail before any work if an input is missing.
  for (const auto& path : spec.images)
    if (!std::filesystem::exists(path)) throw Error("missing image: " + path);

  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);

  // One work unit per (image, S, trial): embed once, then run the whole
  // parameter grid against that watermarked image.
  struct Unit {
    std::size_t image_idx, s_idx, trial;
  };
  std::vector<Unit> units;
  for (std::size_t i = 0; i < spec.images.size(); ++i)
    for (std::size_t s = 0; s < spec.strengths.size(); ++s)
      for (int t = 0; t < spec.trials; ++t)
        units.push_back({i, s, static_cast<std::size_t>(t)});

  std::vector<std::vector<SweepRow>> unit_rows(units.size());
  parallel_for(units.size(), [&](std::size_t u) {
    const Unit unit = units[u];
    const std::string& path = spec.images[unit.image_idx];
    const std::string name = fs::path(path).stem().string();

    PipelineConfig cfg;
    cfg.strength = spec.strengths[unit.s_idx];

    std::vector<SweepRow>& rows = unit_rows[u];
    GrayImage original;
    EmbedOutcome outcome;
    BitSequence bits;
    bool embedded = false;
    try {
      original = load_image(path);
      cfg.reference_width = original.width;
      cfg.reference_height = original.height;
      bits = random_bits(hash_bytes(cfg.master_seed,
                                    spec.seed * 1000003ULL + unit.image_idx * 101ULL +
                                        unit.trial),
                         cfg.payload_bits());
      outcome = embed(original, bits, cfg);
      embedded = true;
    } catch (const Error&) {
      embedded = false;
    }

    for (std::size_t p = 0; p < spec.param_values.size(); ++p) {
      SweepRow row;
      row.image = name;
      row.attack = spec.attack_family;
      row.param = spec.param_values[p];
      row.strength = spec.strengths[unit.s_idx];
      if (!embedded) {
        row.ok = false;
        rows.push_back(row);
        continue;
      }
      try {
        const std::uint64_t cell_seed =
            spec.seed + 7919ULL * unit.image_idx + 233ULL * p + unit.trial + 1;
        const AttackSpec attack = make_attack(spec, spec.param_values[p],
                                              cell_seed);
        const GrayImage attacked = apply_attack(outcome.image, attack);
        const BitSequence decoded = extract(attacked, cfg);
        row.ber_value = ber(bits, decoded);
        row.psnr_value = outcome.quality.psnr;
        row.ssim_value = outcome.quality.ssim;
      } catch (const Error&) {
        row.ok = false;
      }
      rows.push_back(row);
    }
  });

  // Flatten in deterministic (image, attack, param, S, trial) order.
  const std::size_t n_s = spec.strengths.size();
  const std::size_t n_t = static_cast<std::size_t>(spec.trials);
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < spec.images.size(); ++i)
    for (std::size_t p = 0; p < spec.param_values.size(); ++p)
      for (std::size_t s = 0; s < n_s; ++s)
        for (std::size_t t = 0; t < n_t; ++t)
          rows.push_back(unit_rows[(i * n_s + s) * n_t + t][p]);

  SweepOutput output;
  output.trials_csv_path = (fs::path(spec.out_dir) / "trials.csv").string();
  output.aggregate_csv_path =
      (fs::path(spec.out_dir) / "aggregate.csv").string();

  {
    std::ofstream out(output.trials_csv_path, std::ios::trunc);
    if (!out) throw Error("cannot write " + output.trials_csv_path);
    out << "image,attack,param,S,ber,psnr,ssim,status\n";
    for (const auto& r : rows) {
      out << r.image << ',' << r.attack << ',' << fmt(r.param) << ','
          << fmt(r.strength) << ',';
      if (r.ok)
        out << fmt(r.ber_value) << ',' << fmt(r.psnr_value) << ','
            << fmt(r.ssim_value) << ",ok\n";
      else
        out << ",,,failed\n";
    }
  }

  {
    // Aggregate means per (attack, param, S) over successful cells.
    struct Agg {
      double ber_sum = 0, psnr_sum = 0, ssim_sum = 0;
      long n = 0, failures = 0;
    };
    std::map<std::pair<double, double>, Agg> agg;  // (param, S)
    for (const auto& r : rows) {
      Agg& a = agg[{r.param, r.strength}];
      if (r.ok) {
        a.ber_sum += r.ber_value;
        a.psnr_sum += r.psnr_value;
        a.ssim_sum += r.ssim_value;
        ++a.n;
      } else {
        ++a.failures;
      }
    }
    std::ofstream out(output.aggregate_csv_path, std::ios::trunc);
    if (!out) throw Error("cannot write " + output.aggregate_csv_path);
    out << "attack,param,S,mean_ber,mean_psnr,mean_ssim,cells,failures\n";
    for (std::size_t p = 0; p < spec.param_values.size(); ++p) {
      for (std::size_t s = 0; s < spec.strengths.size(); ++s) {
        const auto key = std::make_pair(spec.param_values[p],
                                        spec.strengths[s]);
        const Agg& a = agg[key];
        out << spec.attack_family << ',' << fmt(key.first) << ','
            << fmt(key.second) << ',';
        if (a.n > 0)
          out << fmt(a.ber_sum / a.n) << ',' << fmt(a.psnr_sum / a.n) << ','
              << fmt(a.ssim_sum / a.n);
        else
          out << ",,";
        out << ',' << a.n << ',' << a.failures << '\n';
      }
    }
  }
  return output;
}

}  // namespace wmark
