#!/usr/bin/env python3
# Copyright 2026 The wmark Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Exports bundled scikit-image test pictures as 8-bit grayscale PGMs.

Usage: export_corpus.py OUTPUT_DIR

Only images shipped inside the scikit-image wheel are used, so this works
offline. Color images are converted with BT.601 luma weights. Exits nonzero
when scikit-image is unavailable.
"""

import os
import sys

try:
    import numpy as np
    import skimage.data as data
except ImportError as exc:  # pragma: no cover
    print(f"corpus export skipped: {exc}", file=sys.stderr)
    sys.exit(1)


def to_gray(img):
    if img.ndim == 2:
        return img.astype(np.uint8)
    rgb = img[..., :3].astype(np.float64)
    luma = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.rint(luma), 0, 255).astype(np.uint8)


def save_pgm(img, path):
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        fh.write(img.tobytes())


def main():
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 2
    out_dir = sys.argv[1]
    os.makedirs(out_dir, exist_ok=True)

    sources = {
        "camera": lambda: data.camera(),
        "moon": lambda: data.moon(),
        "brick": lambda: data.brick(),
        "grass": lambda: data.grass(),
        "gravel": lambda: data.gravel(),
        "coins": lambda: data.coins(),
        "cell": lambda: data.cell(),
        "astronaut": lambda: data.astronaut(),
        "chelsea": lambda: data.chelsea(),
        "coffee": lambda: data.coffee(),
        "ihc": lambda: data.immunohistochemistry(),
        "rocket": lambda: data.rocket(),
        "motorcycle_left": lambda: data.stereo_motorcycle()[0],
        "motorcycle_right": lambda: data.stereo_motorcycle()[1],
    }

    written = 0
    for name, loader in sorted(sources.items()):
        try:
            img = to_gray(loader())
        except Exception as exc:
            print(f"skipping {name}: {exc}", file=sys.stderr)
            continue
        if img.shape[0] < 300 or img.shape[1] < 300:
            print(f"skipping {name}: too small {img.shape}", file=sys.stderr)
            continue
        save_pgm(img, os.path.join(out_dir, f"{name}.pgm"))
        written += 1

    print(f"wrote {written} images to {out_dir}")
    return 0 if written >= 12 else 1


if __name__ == "__main__":
    sys.exit(main())
