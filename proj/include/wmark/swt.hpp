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

#ifndef WMARK_SWT_HPP
#define WMARK_SWT_HPP

#include "wmark/plane.hpp"

namespace wmark {

/// Single-level undecimated Haar decomposition of a square area. All four
/// planes keep the area's full size.
struct SwtBands {
  RealPlane app;  // low/low
  RealPlane hor;  // low rows, high columns
  RealPlane ver;  // high rows, low columns
  RealPlane dia;  // high/high
};

/// Analysis with the orthonormal Haar pair (1/sqrt2, 1/sqrt2) and periodic
/// extension. Side lengths must be even.
SwtBands swt_forward(const RealPlane& area);

/// Averaged synthesis inverse; iswt_inverse(swt_forward(x)) == x to within
/// 1e-9 elementwise.
RealPlane iswt_inverse(const SwtBands& bands);

/// Smooth part (diagonal band zeroed before synthesis) plus the residual
/// needed to rebuild the input exactly: smooth + residual == area.
struct DenoisedArea {
  RealPlane smooth;
  RealPlane residual;
};

DenoisedArea denoise(const RealPlane& area);

}  // namespace wmark

#endif  // WMARK_SWT_HPP
