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

#ifndef WMARK_CORPUS_HPP
#define WMARK_CORPUS_HPP

#include <string>
#include <vector>

#include "wmark/image.hpp"

namespace wmark {

/// Deterministic procedural test image: multi-octave value noise over a
/// smooth illumination field, plus per-variant structure (edges, blobs,
/// stripes). Texture mass concentrates away from the top band so the
/// corpus behaves like landscape-style photographs.
GrayImage synth_image(int width, int height, std::uint64_t seed, int variant);

/// Writes `count` synthetic 512x512 images (synth_00.pgm ...) into dir.
/// Returns the file paths in order.
std::vector<std::string> write_synthetic_corpus(const std::string& dir,
                                                int count, std::uint64_t seed);

/// All .pgm/.png files in a directory, sorted by name.
std::vector<std::string> list_corpus(const std::string& dir);

}  // namespace wmark

#endif  // WMARK_CORPUS_HPP
