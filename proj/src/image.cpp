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

#include "wmark/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace wmark {

namespace {

// Skips PGM whitespace and '#' comments, then parses one decimal token.
bool next_pgm_token(const std::vector<std::uint8_t>& b, std::size_t& pos,
                    long& out) {
  while (pos < b.size()) {
    char c = static_cast<char>(b[pos]);
    if (c == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= b.size() || !std::isdigit(b[pos])) return false;
  long v = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    v = v * 10 + (b[pos] - '0');
    if (v > 1'000'000'000L) return false;
    ++pos;
  }
  out = v;
  return true;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unreadable file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

struct PngReadCtx {
  const std::uint8_t* p;
  std::size_t left;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t n) {
  auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
  if (ctx->left < n) png_error(png, "truncated PNG stream");
  std::memcpy(out, ctx->p, n);
  ctx->p += n;
  ctx->left -= n;
}

GrayImage decode_png(const std::vector<std::uint8_t>& bytes,
                     const std::string& path) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("png initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("png initialization failed");
  }
  std::vector<std::uint8_t> raster;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("unreadable file: " + path);
  }
  PngReadCtx ctx{bytes.data(), bytes.size()};
  png_set_read_fn(png, &ctx, png_mem_read);
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  if (bit_depth == 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("unsupported bit depth: 16 (" + path + ")");
  }
  png_set_expand(png);      // palette -> rgb, gray<8 -> 8, tRNS -> alpha
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error("unsupported PNG layout (" + path + ")");
  }

  raster.resize(static_cast<std::size_t>(w) * h * channels);
  rows.resize(h);
  for (png_uint_32 r = 0; r < h; ++r)
    rows[r] = raster.data() + static_cast<std::size_t>(r) * w * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  if (channels == 1) {
    std::copy(raster.begin(), raster.end(), img.data.begin());
  } else {
    // BT.601 luma, rounded to nearest.
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      const double y = 0.299 * raster[3 * i] + 0.587 * raster[3 * i + 1] +
                       0.114 * raster[3 * i + 2];
      img.data[i] = static_cast<std::uint8_t>(std::lround(y));
    }
  }
  return img;
}

}  // namespace

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw Error("unreadable: not a P5 PGM");
  std::size_t pos = 2;
  long w = 0, h = 0, maxval = 0;
  if (!next_pgm_token(bytes, pos, w) || !next_pgm_token(bytes, pos, h) ||
      !next_pgm_token(bytes, pos, maxval))
    throw Error("unreadable: malformed PGM header");
  if (w <= 0 || h <= 0) throw Error("unreadable: bad PGM dimensions");
  if (maxval > 255) throw Error("unsupported bit depth: PGM maxval > 255");
  if (maxval <= 0) throw Error("unreadable: bad PGM maxval");
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw Error("unreadable: malformed PGM header");
  ++pos;
  const std::size_t need = static_cast<std::size_t>(w) * h;
  if (bytes.size() - pos < need) throw Error("unreadable: truncated PGM data");
  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  std::memcpy(img.data.data(), bytes.data() + pos, need);
  return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.data.size() != img.pixel_count())
    throw Error("cannot encode empty image");
  std::string header = "P5\n" + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data.begin(), img.data.end());
  return out;
}

GrayImage load_image(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' &&
      bytes[2] == 'N' && bytes[3] == 'G')
    return decode_png(bytes, path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    try {
      return decode_pgm(bytes);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " (" + path + ")");
    }
  }
  throw Error("unreadable file (unknown format): " + path);
}

void save_pgm(const GrayImage& img, const std::string& path) {
  const std::vector<std::uint8_t> bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

}  // namespace wmark
