"""Regenerate the bundled 4x4 digits table.

The 8x8 handwritten digits shipped with scikit-learn are averaged over 2x2
blocks, giving 16 features in the original 0..16 pixel range. This stands
in for block-pooled MNIST when the MNIST files are not at hand.

    python3 demos/make_digits_4x4.py
"""

from __future__ import annotations

import csv
from pathlib import Path

from sklearn.datasets import load_digits

OUT = Path(__file__).resolve().parents[1] / "src" / "vqcverify" / "data" / "digits_4x4.csv"


def main():
    d = load_digits()
    pooled = d.images.reshape(-1, 4, 2, 4, 2).mean(axis=(2, 4)).reshape(-1, 16)
    with OUT.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"p{i}" for i in range(16)] + ["label"])
        for row, label in zip(pooled, d.target):
            w.writerow([f"{v:g}" for v in row] + [int(label)])
    print(f"wrote {len(pooled)} rows to {OUT}")


if __name__ == "__main__":
    main()
