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

// Watermarking benchmark front end.
//
//   wmark embed   -i in.pgm -o out.pgm [--bits 0101...|--wm-seed N] [--config c.json]
//   wmark extract -i in.pgm --config out.pgm.json [--expected 0101...]
//   wmark attack  -i in.pgm -o out.pgm --attack jpeg:quality=70
//   wmark sweep   --attack jpeg --param quality --values 90,70,50,30 \
//                 --corpus dir --out results/
//   wmark corpus  --out dir [--count 14] [--seed 7]

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "wmark/bench.hpp"
#include "wmark/corpus.hpp"
#include "wmark/rng.hpp"

namespace {

wmark::PipelineConfig resolve_config(const std::string& config_path,
                                     const std::string& seed_hex) {
  wmark::PipelineConfig cfg;
  if (!config_path.empty()) cfg = wmark::load_config(config_path);
  if (!seed_hex.empty()) cfg.master_seed = wmark::parse_hex(seed_hex);
  return cfg;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> values;
  std::istringstream in(csv);
  std::string token;
  while (std::getline(in, token, ','))
    if (!token.empty()) values.push_back(std::stod(token));
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local histogram-shifting image watermarking benchmark"};
  app.require_subcommand(1);

  std::string input, output, config_path, seed_hex, bits, expected;
  std::uint64_t wm_seed = 1;

  auto* cmd_embed = app.add_subcommand("embed", "Embed a watermark");
  cmd_embed->add_option("-i,--input", input, "Input image (PGM/PNG)")
      ->required();
  cmd_embed->add_option("-o,--output", output, "Watermarked PGM")->required();
  cmd_embed->add_option("--bits", bits, "Explicit payload bits (0/1 string)");
  cmd_embed->add_option("--wm-seed", wm_seed,
                        "Seed for generated payload bits (default 1)");
  cmd_embed->add_option("--config", config_path, "Pipeline config JSON");
  cmd_embed->add_option("--seed", seed_hex, "Master seed (hex) override");

  auto* cmd_extract = app.add_subcommand("extract", "Extract a watermark");
  cmd_extract->add_option("-i,--input", input, "Image to decode")->required();
  cmd_extract->add_option("--config", config_path,
                          "Pipeline config JSON (embed sidecar works)");
  cmd_extract->add_option("--seed", seed_hex, "Master seed (hex) override");
  cmd_extract->add_option("--expected", expected,
                          "Expected bits; prints BER when given");

  std::string attack_text;
  auto* cmd_attack = app.add_subcommand("attack", "Apply one distortion");
  cmd_attack->add_option("-i,--input", input, "Input image")->required();
  cmd_attack->add_option("-o,--output", output, "Output PGM")->required();
  cmd_attack
      ->add_option("--attack", attack_text,
                   "Spec, e.g. jpeg:quality=70 or gaussian_noise:sigma=3")
      ->required();

  std::string family, param_key, values_csv, strengths_csv = "6", corpus_dir,
                                              out_dir;
  int trials = 1;
  std::uint64_t sweep_seed = 1;
  auto* cmd_sweep = app.add_subcommand("sweep", "Attack/strength sweep -> CSV");
  cmd_sweep->add_option("--attack", family, "Attack family")->required();
  cmd_sweep->add_option("--param", param_key, "Swept parameter name")
      ->required();
  cmd_sweep->add_option("--values", values_csv, "Comma-separated grid")
      ->required();
  cmd_sweep->add_option("--strengths", strengths_csv,
                        "Comma-separated S grid (default 6)");
  cmd_sweep->add_option("--corpus", corpus_dir,
                        "Corpus directory (or set WMARK_CORPUS)");
  cmd_sweep->add_option("--out", out_dir, "Output directory")->required();
  cmd_sweep->add_option("--trials", trials, "Trials per cell (default 1)");
  cmd_sweep->add_option("--sweep-seed", sweep_seed, "Base RNG seed");

  int corpus_count = 14;
  std::uint64_t corpus_seed = 7;
  auto* cmd_corpus =
      app.add_subcommand("corpus", "Generate a synthetic test corpus");
  cmd_corpus->add_option("--out", out_dir, "Output directory")->required();
  cmd_corpus->add_option("--count", corpus_count, "Image count (default 14)");
  cmd_corpus->add_option("--seed", corpus_seed, "Generator seed (default 7)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_embed->parsed()) {
      auto cfg = resolve_config(config_path, seed_hex);
      auto result = wmark::cmd_embed(input, output, bits, wm_seed, cfg);
      std::cout << "bits " << wmark::bits_to_string(result.bits) << "\n"
                << "psnr " << result.quality.psnr << "\n"
                << "ssim " << result.quality.ssim << "\n"
                << "sidecar " << result.sidecar_path << "\n";
    } else if (cmd_extract->parsed()) {
      auto cfg = resolve_config(config_path, seed_hex);
      auto result = wmark::cmd_extract(input, expected, cfg);
      std::cout << "bits " << wmark::bits_to_string(result.bits) << "\n";
      if (result.ber >= 0.0) std::cout << "ber " << result.ber << "\n";
    } else if (cmd_attack->parsed()) {
      const auto spec = wmark::parse_attack(attack_text);
      wmark::save_pgm(wmark::apply_attack(wmark::load_image(input), spec),
                      output);
      std::cout << "wrote " << output << "\n";
    } else if (cmd_sweep->parsed()) {
      wmark::SweepSpec spec;
      spec.attack_family = family;
      spec.param_key = param_key;
      spec.param_values = parse_grid(values_csv);
      spec.strengths = parse_grid(strengths_csv);
      spec.trials = trials;
      spec.seed = sweep_seed;
      spec.out_dir = out_dir;
      if (corpus_dir.empty()) {
        const char* env = std::getenv("WMARK_CORPUS");
        if (env) corpus_dir = env;
      }
      if (corpus_dir.empty())
        throw wmark::Error("no corpus: pass --corpus or set WMARK_CORPUS");
      spec.images = wmark::list_corpus(corpus_dir);
      auto out = wmark::cmd_sweep(spec);
      std::cout << "wrote " << out.trials_csv_path << "\n"
                << "wrote " << out.aggregate_csv_path << "\n";
    } else if (cmd_corpus->parsed()) {
      auto paths = wmark::write_synthetic_corpus(out_dir, corpus_count,
                                                 corpus_seed);
      std::cout << "wrote " << paths.size() << " images to " << out_dir
                << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
