#!/usr/bin/env python3
# Copyright 2026 The qcnn Authors.
# SPDX-License-Identifier: Apache-2.0
"""Builds the desk-scale MNIST subset in IDX format.

Source: the `mnist` npm package (MIT), which ships 10000 MNIST digits as
per-class JSON arrays of 28x28 intensities in [0, 1]. Only the requested
digit classes are kept; images are interleaved round-robin by class so the
file does not contain long single-class runs.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/make_desk_mnist.py package/src/digits data/mnist-desk 3 6 9
"""
import json
import struct
import sys
from pathlib import Path


def main() -> int:
    if len(sys.argv) < 4:
        print(__doc__)
        return 2
    src = Path(sys.argv[1])
    out = Path(sys.argv[2])
    digits = [int(d) for d in sys.argv[3:]]
    per_class = []
    for d in digits:
        raw = json.loads((src / f"{d}.json").read_text())["data"]
        n = len(raw) // 784
        per_class.append([(d, raw[i * 784:(i + 1) * 784]) for i in range(n)])

    samples = []
    i = 0
    while any(i < len(c) for c in per_class):
        for c in per_class:
            if i < len(c):
                samples.append(c[i])
        i += 1

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(samples), 28, 28))
        for _, px in samples:
            f.write(bytes(min(255, max(0, round(v * 255))) for v in px))
    with open(out / "labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(samples)))
        f.write(bytes(label for label, _ in samples))
    print(f"wrote {len(samples)} images for digits {digits} to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
