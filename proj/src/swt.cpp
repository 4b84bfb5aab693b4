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

#include "wmark/swt.hpp"

#include <cmath>

namespace wmark {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Forward Haar pair along rows: low[i] = (x[i] + x[i+1]) / sqrt2,
// high[i] = (x[i] - x[i+1]) / sqrt2, index i+1 taken mod width.
void analyze_rows(const RealPlane& in, RealPlane& low, RealPlane& high) {
  const int w = in.width, h = in.height;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double a = in.at(r, c);
      const double b = in.at(r, (c + 1) % w);
      low.at(r, c) = (a + b) * kInvSqrt2;
      high.at(r, c) = (a - b) * kInvSqrt2;
    }
  }
}

void analyze_cols(const RealPlane& in, RealPlane& low, RealPlane& high) {
  const int w = in.width, h = in.height;
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) {
      const double a = in.at(r, c);
      const double b = in.at((r + 1) % h, c);
      low.at(r, c) = (a + b) * kInvSqrt2;
      high.at(r, c) = (a - b) * kInvSqrt2;
    }
  }
}

// Averaged synthesis: each sample is reconstructed from both shifts of the
// undecimated filter bank and the two results are averaged.
void synthesize_rows(const RealPlane& low, const RealPlane& high,
                     RealPlane& out) {
  const int w = low.width, h = low.height;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int prev = (c + w - 1) % w;
      const double from_here = (low.at(r, c) + high.at(r, c)) * kInvSqrt2;
      const double from_prev = (low.at(r, prev) - high.at(r, prev)) * kInvSqrt2;
      out.at(r, c) = 0.5 * (from_here + from_prev);
    }
  }
}

void synthesize_cols(const RealPlane& low, const RealPlane& high,
                     RealPlane& out) {
  const int w = low.width, h = low.height;
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) {
      const int prev = (r + h - 1) % h;
      const double from_here = (low.at(r, c) + high.at(r, c)) * kInvSqrt2;
      const double from_prev = (low.at(prev, c) - high.at(prev, c)) * kInvSqrt2;
      out.at(r, c) = 0.5 * (from_here + from_prev);
    }
  }
}

}  // namespace

SwtBands swt_forward(const RealPlane& area) {
  if (area.width <= 0 || area.height <= 0)
    throw Error("swt: empty plane");
  if (area.width % 2 != 0 || area.height % 2 != 0)
    throw Error("swt: side lengths must be even");
  for (double v : area.data)
    if (!std::isfinite(v)) throw Error("swt: non-finite input");

  const int w = area.width, h = area.height;
  RealPlane row_low(w, h), row_high(w, h);
  analyze_rows(area, row_low, row_high);

  SwtBands bands{RealPlane(w, h), RealPlane(w, h), RealPlane(w, h),
                 RealPlane(w, h)};
  analyze_cols(row_low, bands.app, bands.hor);
  analyze_cols(row_high, bands.ver, bands.dia);
  return bands;
}

RealPlane iswt_inverse(const SwtBands& bands) {
  const RealPlane& a = bands.app;
  if (!a.same_dims(bands.hor) || !a.same_dims(bands.ver) ||
      !a.same_dims(bands.dia))
    throw Error("iswt: band dimension mismatch");
  if (a.width <= 0 || a.height <= 0) throw Error("iswt: empty bands");

  const int w = a.width, h = a.height;
  RealPlane row_low(w, h), row_high(w, h), out(w, h);
  synthesize_cols(bands.app, bands.hor, row_low);
  synthesize_cols(bands.ver, bands.dia, row_high);
  synthesize_rows(row_low, row_high, out);
  return out;
}

DenoisedArea denoise(const RealPlane& area) {
  SwtBands bands = swt_forward(area);
  bands.dia = RealPlane(bands.dia.width, bands.dia.height, 0.0);
  DenoisedArea d;
  d.smooth = iswt_inverse(bands);
  d.residual = RealPlane(area.width, area.height);
  for (std::size_t i = 0; i < area.data.size(); ++i)
    d.residual.data[i] = area.data[i] - d.smooth.data[i];
  return d;
}

}  // namespace wmark
