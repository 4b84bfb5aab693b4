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

#ifndef WMARK_TESTS_SUPPORT_HPP
#define WMARK_TESTS_SUPPORT_HPP

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include "wmark/corpus.hpp"
#include "wmark/image.hpp"
#include "wmark/plane.hpp"
#include "wmark/rng.hpp"

namespace wmark::test {

/// Unique scratch directory under the system temp dir, removed on scope
/// exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("wmark_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline GrayImage random_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  GrayImage img(w, h);
  for (auto& px : img.data)
    px = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

inline RealPlane random_plane(int w, int h, std::uint64_t seed,
                              double lo = 0.0, double hi = 255.0) {
  Rng rng(seed);
  RealPlane p(w, h);
  for (auto& v : p.data) v = lo + (hi - lo) * rng.unit();
  return p;
}

/// A textured photographic stand-in (512x512) shared by slow tests.
inline const GrayImage& textured_image() {
  static const GrayImage img = synth_image(512, 512, 42, 0);
  return img;
}

}  // namespace wmark::test

#endif  // WMARK_TESTS_SUPPORT_HPP
