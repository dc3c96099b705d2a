"""Dataset ingestion: Iris CSV, MNIST IDX files and a bundled 4x4 digits set.

Features come out as angles in ``[0, pi]`` (configurable), ready to bind to
a circuit's encoding variables.
"""

from __future__ import annotations

import csv
import gzip
import math
import struct
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_RANGE = (0.0, math.pi)
IRIS_CLASSES = ("setosa", "versicolor")


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetSample:
    features: tuple[float, ...]
    label: int

    def env(self, names: Sequence[str]) -> dict[str, float]:
        if len(names) != len(self.features):
            raise DatasetError(f"sample has {len(self.features)} features, circuit expects {len(names)}")
        return dict(zip(names, self.features))

    def to_json(self) -> dict:
        return {"features": list(self.features), "label": self.label}

    @classmethod
    def from_json(cls, d: dict) -> "DatasetSample":
        return cls(tuple(float(x) for x in d["features"]), int(d["label"]))


def data_path(name: str) -> Path:
    return Path(str(resources.files("vqcverify") / "data" / name))


def minmax_scale(x: np.ndarray, target: tuple[float, float] = DEFAULT_RANGE) -> np.ndarray:
    """Per-column min-max scaling; constant columns map to the lower bound."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return x
    lo, hi = x.min(axis=0), x.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    a, b = target
    return np.clip(a + (x - lo) / span * (b - a), a, b)


def _norm_label(s: str) -> str:
    s = s.strip().lower()
    return s[5:] if s.startswith("iris-") else s


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_iris(path=None, classes: Sequence[str] = IRIS_CLASSES, target: tuple[float, float] = DEFAULT_RANGE) -> list[DatasetSample]:
    """Read an Iris CSV (4 numeric columns + species) and keep two classes.

    Accepts the UCI layout (``5.1,3.5,1.4,0.2,Iris-setosa``), an optional
    header row, and the numeric-label variant whose header lists the class
    names (``150,4,setosa,versicolor,virginica``).
    """
    path = data_path("iris.csv") if path is None else Path(path)
    wanted = [_norm_label(c) for c in classes]
    if len(wanted) != 2 or wanted[0] == wanted[1]:
        raise DatasetError("need two distinct class names")
    known = {"setosa", "versicolor", "virginica"}
    for w in wanted:
        if w not in known:
            raise DatasetError(f"unknown label: {w}")
    names: list[str] | None = None
    feats, labels = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            row = [f.strip() for f in row]
            if not row or all(not f for f in row):
                continue
            if lineno == 1:
                counts = len(row) > 2 and row[0].isdigit() and row[1].isdigit() and not _is_float(row[2])
                if counts:
                    names = [_norm_label(f) for f in row[2:]]
                if counts or not _is_float(row[0]):
                    continue
            if len(row) != 5 or not all(_is_float(f) for f in row[:4]):
                raise DatasetError(f"{path}:{lineno}: malformed row {row!r}")
            label = row[4]
            if names is not None and label.isdigit():
                k = int(label)
                if k >= len(names):
                    raise DatasetError(f"{path}:{lineno}: unknown label: {label}")
                label = names[k]
            label = _norm_label(label)
            if label not in known:
                raise DatasetError(f"{path}:{lineno}: unknown label: {label}")
            if label in wanted:
                feats.append([float(f) for f in row[:4]])
                labels.append(wanted.index(label))
    x = minmax_scale(np.array(feats).reshape(-1, 4), target)
    return [DatasetSample(tuple(map(float, f)), y) for f, y in zip(x, labels)]


_IDX_TYPES = {0x08: ">u1", 0x09: ">i1", 0x0B: ">i2", 0x0C: ">i4", 0x0D: ">f4", 0x0E: ">f8"}


def read_idx(path) -> np.ndarray:
    """Parse an IDX file (optionally gzipped)."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 4 or raw[0] != 0 or raw[1] != 0 or raw[2] not in _IDX_TYPES:
        raise DatasetError(f"{path}: bad IDX magic number")
    ndim = raw[3]
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise DatasetError(f"{path}: truncated IDX header")
    shape = struct.unpack(f">{ndim}I", raw[4:header])
    dtype = np.dtype(_IDX_TYPES[raw[2]])
    count = int(np.prod(shape)) if shape else 1
    if len(raw) - header < count * dtype.itemsize:
        raise DatasetError(f"{path}: truncated IDX data (expected {count} items)")
    return np.frombuffer(raw, dtype=dtype, count=count, offset=header).reshape(shape)


def block_pool(images: np.ndarray, out: int = 4) -> np.ndarray:
    """Average-pool square images ``(N, s, s)`` down to ``(N, out*out)``."""
    n, s, s2 = images.shape
    if s != s2 or s % out:
        raise DatasetError(f"cannot pool {s}x{s2} images to {out}x{out}")
    k = s // out
    return images.reshape(n, out, k, out, k).mean(axis=(2, 4)).reshape(n, out * out)


def _select(x: np.ndarray, y: np.ndarray, digits: Sequence[int], scale: float, target) -> list[DatasetSample]:
    digits = [int(d) for d in digits]
    if len(digits) != 2 or digits[0] == digits[1]:
        raise DatasetError("need two distinct digits")
    keep = np.isin(y, digits)
    a, b = target
    feats = a + np.clip(x[keep] / scale, 0, 1) * (b - a)
    labels = [digits.index(int(v)) for v in y[keep]]
    return [DatasetSample(tuple(map(float, f)), lab) for f, lab in zip(feats, labels)]


def load_mnist_4x4(images_path, labels_path, digits: Sequence[int] = (0, 1), target=DEFAULT_RANGE) -> list[DatasetSample]:
    """MNIST pooled over 7x7 blocks to 16 features, filtered to two digits."""
    images = read_idx(images_path)
    labels = read_idx(labels_path)
    if images.ndim != 3 or labels.ndim != 1:
        raise DatasetError("expected 3-d images and 1-d labels")
    if images.shape[0] != labels.shape[0]:
        raise DatasetError(f"{images.shape[0]} images but {labels.shape[0]} labels")
    return _select(block_pool(images.astype(float), 4), labels.astype(int), digits, 255.0, target)


def load_digits_4x4(path=None, digits: Sequence[int] = (0, 1), target=DEFAULT_RANGE) -> list[DatasetSample]:
    """The bundled 8x8 handwritten digits, pooled to 4x4 (pixel range 0..16)."""
    path = data_path("digits_4x4.csv") if path is None else Path(path)
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return _select(arr[:, :16], arr[:, 16].astype(int), digits, 16.0, target)


def mottonen_angles(x: Sequence[float]) -> tuple[float, ...]:
    """Rotation angles preparing the normalized amplitudes ``x`` (4 reals).

    The order matches the ``ccqc`` encoding block's inputs ``x0..x4``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise DatasetError("amplitude preparation needs 4 features")
    norm = np.linalg.norm(x)
    if norm == 0:
        return (0.0,) * 5
    b0 = 2 * math.asin(min(1.0, abs(x[1]) / math.sqrt(x[0] ** 2 + x[1] ** 2 + 1e-12)))
    b1 = 2 * math.asin(min(1.0, abs(x[3]) / math.sqrt(x[2] ** 2 + x[3] ** 2 + 1e-12)))
    b2 = 2 * math.asin(min(1.0, float(np.linalg.norm(x[2:]) / norm)))
    return (b2, -b1 / 2, b1 / 2, -b0 / 2, b0 / 2)


def amplitude_samples(samples: Sequence[DatasetSample]) -> list[DatasetSample]:
    return [DatasetSample(mottonen_angles(s.features), s.label) for s in samples]
