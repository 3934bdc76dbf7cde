"""Dataset generation and file loading.

Synthetic "moons" clouds for any class count, plain CSV point files, and the
KEEL .dat format for imbalanced binary benchmarks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Dataset


@dataclass(frozen=True)
class MoonSpec:
    """Interleaving half-circle classes.

    Class j is the arc (cos t + j, sin t) for even j and (cos t + j,
    0.5 - sin t) for odd j, t uniform on [0, pi], with isotropic Gaussian
    noise of standard deviation ``noise`` added per coordinate.
    """

    classes: int = 2
    points_per_class: int = 1000
    noise: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.classes < 2:
            raise ValueError("need at least 2 classes")
        if self.points_per_class < 1:
            raise ValueError("need at least 1 point per class")
        if self.noise < 0 or not np.isfinite(self.noise):
            raise ValueError("noise must be finite and >= 0")


def moon_point(j: int, t: float) -> tuple[float, float]:
    """Noise-free point of class j at arc parameter t."""
    if j % 2 == 0:
        return math.cos(t) + j, math.sin(t)
    return math.cos(t) + j, 0.5 - math.sin(t)


def gen_moons(spec: MoonSpec) -> Dataset:
    """Sample the moons dataset; rows interleave classes round-robin."""
    rng = np.random.default_rng(spec.seed)
    m, ppc = spec.classes, spec.points_per_class
    t = rng.uniform(0.0, np.pi, size=(m, ppc))
    clean = np.empty((m, ppc, 2))
    for j in range(m):
        clean[j, :, 0] = np.cos(t[j]) + j
        if j % 2 == 0:
            clean[j, :, 1] = np.sin(t[j])
        else:
            clean[j, :, 1] = 0.5 - np.sin(t[j])
    # row order: class 0 point 0, class 1 point 0, ..., class 0 point 1, ...
    pts = clean.transpose(1, 0, 2).reshape(m * ppc, 2)
    labels = np.tile(np.arange(m), ppc)
    pts = pts + rng.normal(0.0, spec.noise, size=pts.shape)
    return Dataset(points=pts, labels=labels, k=m)


def save_csv(data: Dataset, path) -> None:
    """Write one row per point, features then the integer label if present."""
    lines = []
    for i in range(data.n):
        cells = ["%.17g" % v for v in data.points[i]]
        if data.labels is not None:
            cells.append(str(int(data.labels[i])))
        lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_csv(path, has_label_column: bool = True) -> Dataset:
    """Read a CSV point file.

    Rows are comma-separated floats; lines starting with ``#`` and blank
    lines are skipped.  With ``has_label_column`` the last cell is an integer
    class id.  Raw label values are remapped to 0..k-1 in order of first
    appearance; the mapping is stored on the dataset.
    """
    rows, raw_labels = [], []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cells = [c.strip() for c in line.split(",")]
            if width is None:
                width = len(cells)
                if has_label_column and width < 2:
                    raise ValueError("line %d: need at least one feature and a label" % lineno)
            elif len(cells) != width:
                raise ValueError("line %d: expected %d cells, got %d"
                                 % (lineno, width, len(cells)))
            feat = cells[:-1] if has_label_column else cells
            try:
                rows.append([float(c) for c in feat])
            except ValueError:
                raise ValueError("line %d: non-numeric feature cell" % lineno) from None
            if has_label_column:
                try:
                    val = float(cells[-1])
                except ValueError:
                    raise ValueError("line %d: non-numeric label cell" % lineno) from None
                if val != int(val):
                    raise ValueError("line %d: label is not an integer" % lineno)
                raw_labels.append(int(val))
    if not rows:
        raise ValueError("no data rows in %s" % path)
    pts = np.asarray(rows)
    if not has_label_column:
        return Dataset(points=pts)
    mapping: dict[int, int] = {}
    for v in raw_labels:
        if v not in mapping:
            mapping[v] = len(mapping)
    if len(mapping) < 2:
        raise ValueError("labeled file contains a single class")
    labels = np.asarray([mapping[v] for v in raw_labels], dtype=np.int64)
    return Dataset(points=pts, labels=labels, k=len(mapping), label_map=dict(mapping))


@dataclass(frozen=True)
class KeelInfo:
    """Class balance summary of a KEEL file."""

    n: int
    minority_class: int
    minority_count: int
    majority_count: int
    imbalance_ratio: float

    @property
    def minority_fraction(self) -> float:
        return self.minority_count / self.n


def load_keel(path) -> tuple[Dataset, KeelInfo]:
    """Read a KEEL .dat file.

    Lines up to and including the ``@data`` marker are treated as metadata.
    Data rows are comma-separated features with the class tag last.  Tags are
    trimmed and compared case-insensitively; the vocabulary {negative,
    positive} maps to {0, 1}, anything else is remapped in first-appearance
    order.  Returns the dataset and the class balance summary (imbalance
    ratio = majority count / minority count).
    """
    data_rows = []
    in_data = False
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if not in_data:
                if line.lower().startswith("@data"):
                    in_data = True
                continue
            cells = [c.strip() for c in line.split(",")]
            if len(cells) < 2:
                raise ValueError("line %d: need at least one feature and a class tag" % lineno)
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ValueError("line %d: expected %d cells, got %d"
                                 % (lineno, width, len(cells)))
            try:
                feat = [float(c) for c in cells[:-1]]
            except ValueError:
                raise ValueError("line %d: non-numeric feature cell" % lineno) from None
            data_rows.append((feat, cells[-1].lower()))
    if not in_data:
        raise ValueError("missing @data marker in %s" % path)
    if not data_rows:
        raise ValueError("no data rows in %s" % path)
    tags = [tag for _, tag in data_rows]
    vocab = set(tags)
    if len(vocab) < 2:
        raise ValueError("file contains a single class")
    if vocab == {"negative", "positive"}:
        mapping = {"negative": 0, "positive": 1}
    else:
        mapping = {}
        for tag in tags:
            if tag not in mapping:
                mapping[tag] = len(mapping)
    labels = np.asarray([mapping[tag] for tag in tags], dtype=np.int64)
    pts = np.asarray([feat for feat, _ in data_rows])
    k = len(mapping)
    counts = np.bincount(labels, minlength=k)
    minority = int(np.argmin(counts))
    info = KeelInfo(
        n=pts.shape[0],
        minority_class=minority,
        minority_count=int(counts[minority]),
        majority_count=int(counts.max()),
        imbalance_ratio=float(counts.max() / counts[minority]),
    )
    return Dataset(points=pts, labels=labels, k=k, label_map=dict(mapping)), info
