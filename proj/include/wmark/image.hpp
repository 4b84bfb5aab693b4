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

#ifndef WMARK_IMAGE_HPP
#define WMARK_IMAGE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wmark {

/// Error type for all recoverable failures (I/O, contract violations).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// 8-bit single-channel raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // size == width * height

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int r, int c) {
    return data[static_cast<std::size_t>(r) * width + c];
  }
  std::uint8_t at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * width + c];
  }
  std::size_t pixel_count() const { return data.size(); }
  bool same_dims(const GrayImage& o) const {
    return width == o.width && height == o.height;
  }
  bool inside(int r, int c) const {
    return r >= 0 && r < height && c >= 0 && c < width;
  }

  friend bool operator==(const GrayImage& a, const GrayImage& b) {
    return a.width == b.width && a.height == b.height && a.data == b.data;
  }
};

/// Reads an 8-bit grayscale image. Supported containers: binary PGM (P5)
/// and PNG. Color PNGs are converted to luma with BT.601 weights; 16-bit
/// inputs are rejected.
GrayImage load_image(const std::string& path);

/// Writes binary PGM (P5, maxval 255). Round-trips bit-exactly through
/// load_image.
void save_pgm(const GrayImage& img, const std::string& path);

/// PGM codec working on in-memory buffers (the file functions wrap these).
GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

}  // namespace wmark

#endif  // WMARK_IMAGE_HPP
