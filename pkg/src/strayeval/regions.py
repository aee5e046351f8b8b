"""Connected-component labeling and per-region properties.

Fault artifacts are counted as connected regions of mask pixels. The default
adjacency is 8-neighbor (diagonals included), which treats a flare split by
a thin diagonal seam as one artifact.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage

from .mask import BinaryMask

__all__ = [
    "Connectivity",
    "LabelMap",
    "Region",
    "label_components",
    "region_properties",
]


class Connectivity(Enum):
    """Pixel adjacency rule for region extraction."""

    FOUR = 4  # edge-sharing neighbors only
    EIGHT = 8  # edge- and corner-sharing neighbors

    @property
    def structure(self) -> np.ndarray:
        if self is Connectivity.FOUR:
            return np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)
        return np.ones((3, 3), dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class LabelMap:
    """Region decomposition of a mask.

    ``labels`` is a (height, width) integer array: 0 marks background, and
    the nonzero labels are exactly 1..region_count. Regions are numbered by
    the row-major position of their first pixel, so labeling is reproducible.
    """

    labels: np.ndarray
    region_count: int

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 2:
            raise ValueError(f"label map must be 2-D, got shape {labels.shape}")
        labels = labels.astype(np.int32, copy=True)
        if labels.size and labels.min() < 0:
            raise ValueError("labels must be non-negative")
        counts = np.bincount(labels.ravel(), minlength=self.region_count + 1)
        if len(counts) != self.region_count + 1:
            raise ValueError("labels exceed region_count")
        if self.region_count and not counts[1:].all():
            missing = int(np.flatnonzero(counts[1:] == 0)[0]) + 1
            raise ValueError(f"label {missing} has no pixels")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape


@dataclass(frozen=True)
class Region:
    """Bookkeeping for one connected region."""

    label: int
    area: int
    bbox: tuple[int, int, int, int]  # (min_row, min_col, max_row, max_col)
    centroid: tuple[float, float]  # (row, col)


def label_components(
    m: BinaryMask, connectivity: Connectivity = Connectivity.EIGHT
) -> LabelMap:
    """Decompose a mask into connected regions.

    Returns a LabelMap whose regions are numbered 1..n in order of each
    region's first pixel in a row-major scan.
    """
    labels, n = ndimage.label(m.bits, structure=connectivity.structure)
    if n:
        labels = _renumber_scan_order(labels, n)
    return LabelMap(labels=labels, region_count=int(n))


def _renumber_scan_order(labels: np.ndarray, n: int) -> np.ndarray:
    flat = labels.ravel()
    # Repeated fancy-index stores land in index order, so writing positions
    # back to front leaves each label's first (row-major) occurrence behind.
    first = np.empty(n + 1, dtype=np.int64)
    first[flat[::-1]] = np.arange(flat.size - 1, -1, -1, dtype=np.int64)
    order = np.argsort(first[1:], kind="stable")
    perm = np.empty(n + 1, dtype=np.int32)
    perm[0] = 0
    perm[order + 1] = np.arange(1, n + 1, dtype=np.int32)
    if np.array_equal(perm, np.arange(n + 1, dtype=np.int32)):
        return labels  # already numbered in scan order
    return perm[labels]


def region_properties(lm: LabelMap) -> list[Region]:
    """Area, bounding box, and centroid for every region, ordered by label."""
    n = lm.region_count
    if n == 0:
        return []
    flat = lm.labels.ravel()
    nz = np.flatnonzero(flat)
    lab = flat[nz]
    rows, cols = np.divmod(nz, lm.width)
    areas = np.bincount(lab, minlength=n + 1)[1:]
    sum_r = np.bincount(lab, weights=rows, minlength=n + 1)[1:]
    sum_c = np.bincount(lab, weights=cols, minlength=n + 1)[1:]
    slices = ndimage.find_objects(lm.labels)
    out = []
    for i in range(n):
        sr, sc = slices[i]
        out.append(
            Region(
                label=i + 1,
                area=int(areas[i]),
                bbox=(sr.start, sc.start, sr.stop - 1, sc.stop - 1),
                centroid=(sum_r[i] / areas[i], sum_c[i] / areas[i]),
            )
        )
    return out
