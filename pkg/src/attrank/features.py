"""Bag-of-visual-words features for grayscale product images.

Pipeline: dense multi-scale gradient descriptors -> k-means vocabulary ->
L1-normalized histogram.  The descriptor is a simplified dense SIFT-style
patch: a 4x4 spatial grid of 8-bin gradient-orientation histograms
(128 dimensions), extracted on a regular grid at three patch scales.
Externally computed descriptors or histograms can be injected instead via
the file formats in :mod:`attrank.formats`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InsufficientDataError, ShapeError

DESCRIPTOR_DIM = 128
_GRID_CELLS = 4
_ORI_BINS = 8

# Fraction of the largest representable descriptor energy below which a
# patch counts as flat and its descriptor is zeroed.
DEFAULT_EPS_FLAT = 1e-4

DEFAULT_BIN_SIZES = (4, 6, 8)
DEFAULT_STEP = 4


@dataclass(frozen=True)
class GrayImage:
    """A grayscale image with intensities in [0, 1], row-major."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.size == 0:
            raise ShapeError("pixels must be a nonempty 2-d array")
        if px.min() < 0.0 or px.max() > 1.0:
            raise DomainError("pixel intensities must lie in [0, 1]")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @classmethod
    def from_pgm(cls, path: str | Path) -> "GrayImage":
        """Read an 8-bit binary PGM (P5) file."""
        data = Path(path).read_bytes()
        return cls.from_pgm_bytes(data)

    @classmethod
    def from_pgm_bytes(cls, data: bytes) -> "GrayImage":
        if not data.startswith(b"P5"):
            raise DomainError("not a binary PGM (P5) file")
        # Header: magic, width, height, maxval, separated by whitespace;
        # '#' starts a comment running to end of line.
        pos = 2
        fields: list[int] = []
        while len(fields) < 3:
            while pos < len(data) and data[pos : pos + 1].isspace():
                pos += 1
            if pos < len(data) and data[pos : pos + 1] == b"#":
                eol = data.find(b"\n", pos)
                pos = len(data) if eol == -1 else eol + 1
                continue
            m = re.match(rb"\d+", data[pos:])
            if not m:
                raise DomainError("malformed PGM header")
            fields.append(int(m.group()))
            pos += m.end()
        width, height, maxval = fields
        if maxval <= 0 or maxval > 255:
            raise DomainError(f"PGM maxval {maxval} is not 8-bit")
        pos += 1  # single whitespace byte after maxval
        raw = data[pos : pos + width * height]
        if len(raw) != width * height:
            raise DomainError("PGM pixel data truncated")
        px = np.frombuffer(raw, dtype=np.uint8).reshape(height, width)
        return cls(px.astype(np.float64) / maxval)


@dataclass(frozen=True)
class DescriptorSet:
    """Dense descriptors with their grid positions and patch scales.

    Every row of ``vectors`` is either the zero vector (flat patch) or
    L2-normalized.  ``x``/``y`` are the patch-center coordinates.
    """

    vectors: np.ndarray
    x: np.ndarray
    y: np.ndarray
    scale: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vectors, dtype=np.float64).reshape(-1, DESCRIPTOR_DIM)
        n = v.shape[0]
        for name in ("x", "y", "scale"):
            arr = np.asarray(getattr(self, name))
            if arr.shape != (n,):
                raise ShapeError(f"{name} must have one entry per descriptor")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "vectors", v)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def empty(cls) -> "DescriptorSet":
        z = np.zeros(0)
        return cls(np.zeros((0, DESCRIPTOR_DIM)), z, z, z)

    def nonzero_vectors(self) -> np.ndarray:
        norms = np.linalg.norm(self.vectors, axis=1)
        return self.vectors[norms > 0]


@dataclass(frozen=True)
class Vocabulary:
    """k-means centers over descriptor space."""

    centers: np.ndarray
    training_seed: int

    def __post_init__(self) -> None:
        c = np.asarray(self.centers, dtype=np.float64)
        if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] != DESCRIPTOR_DIM:
            raise ShapeError(f"centers must be (k, {DESCRIPTOR_DIM}) with k >= 1")
        object.__setattr__(self, "centers", c)

    @property
    def k(self) -> int:
        return self.centers.shape[0]


@dataclass(frozen=True)
class BowHistogram:
    """L1-normalized visual-word histogram.

    When ``descriptor_count`` is zero all bins are zero; otherwise the bins
    sum to one within 1e-9.
    """

    bins: np.ndarray
    descriptor_count: int

    def __post_init__(self) -> None:
        b = np.asarray(self.bins, dtype=np.float64)
        if b.ndim != 1 or b.size < 1:
            raise ShapeError("bins must be a nonempty vector")
        if np.any(b < 0):
            raise DomainError("histogram bins must be nonnegative")
        if self.descriptor_count < 0:
            raise DomainError("descriptor_count must be nonnegative")
        if self.descriptor_count == 0:
            if np.any(b != 0):
                raise DomainError("empty histogram must have all-zero bins")
        elif abs(b.sum() - 1.0) > 1e-9:
            raise DomainError(f"histogram bins sum to {b.sum()!r}, expected 1")
        object.__setattr__(self, "bins", b)

    @property
    def dim(self) -> int:
        return self.bins.size

    @classmethod
    def from_counts(cls, counts: Sequence[float] | np.ndarray) -> "BowHistogram":
        c = np.asarray(counts, dtype=np.float64)
        total = c.sum()
        if total <= 0:
            return cls(np.zeros_like(c), 0)
        return cls(c / total, int(round(total)))


def _orientation_maps(pixels: np.ndarray) -> np.ndarray:
    """Per-orientation gradient-magnitude maps, shape (8, h, w)."""
    gy, gx = np.gradient(pixels)
    mag = np.hypot(gx, gy)
    ori = np.mod(np.arctan2(gy, gx), 2.0 * np.pi)
    idx = np.minimum((ori / (2.0 * np.pi / _ORI_BINS)).astype(np.int64), _ORI_BINS - 1)
    maps = np.zeros((_ORI_BINS, *pixels.shape))
    for b in range(_ORI_BINS):
        maps[b][idx == b] = mag[idx == b]
    return maps


def dense_descriptors(
    image: GrayImage,
    bin_sizes: Sequence[int] = DEFAULT_BIN_SIZES,
    step: int = DEFAULT_STEP,
    eps_flat: float = DEFAULT_EPS_FLAT,
) -> DescriptorSet:
    """Extract dense 128-d gradient descriptors at the given patch scales.

    A patch at scale ``b`` covers 4b x 4b pixels (a 4x4 grid of b x b cells,
    each an 8-bin orientation histogram of gradient magnitudes).  Patches are
    placed on a regular grid with the given ``step``.  Descriptors are
    L2-normalized unless their raw energy falls below ``eps_flat`` times the
    largest representable energy at that scale, in which case they are zero.
    """
    if step < 1:
        raise DomainError("step must be a positive integer")
    if len(bin_sizes) == 0 or any(b < 1 for b in bin_sizes):
        raise DomainError("bin_sizes must be positive integers")
    h, w = image.height, image.width
    for b in bin_sizes:
        if w < _GRID_CELLS * b or h < _GRID_CELLS * b:
            raise DomainError(
                f"image {w}x{h} too small for bin size {b}: needs at least "
                f"{_GRID_CELLS * b}x{_GRID_CELLS * b}"
            )

    maps = _orientation_maps(image.pixels)
    # Integral images give O(1) cell sums: integ[:, y1, x1] - ... over any box.
    integ = np.zeros((_ORI_BINS, h + 1, w + 1))
    integ[:, 1:, 1:] = np.cumsum(np.cumsum(maps, axis=1), axis=2)

    def box_sum(y0: np.ndarray, x0: np.ndarray, size: int) -> np.ndarray:
        return (
            integ[:, y0 + size, x0 + size]
            - integ[:, y0 + size, x0]
            - integ[:, y0, x0 + size]
            + integ[:, y0, x0]
        )

    all_vecs, all_x, all_y, all_s = [], [], [], []
    for b in bin_sizes:
        patch = _GRID_CELLS * b
        xs = np.arange(0, w - patch + 1, step)
        ys = np.arange(0, h - patch + 1, step)
        gx, gy = np.meshgrid(xs, ys, indexing="xy")
        gx, gy = gx.ravel(), gy.ravel()
        cells = []
        for cy in range(_GRID_CELLS):
            for cx in range(_GRID_CELLS):
                cells.append(box_sum(gy + cy * b, gx + cx * b, b))  # (8, npatch)
        # Cell-major layout: descriptor index = cell * 8 + orientation.
        desc = np.stack(cells, axis=0).reshape(_GRID_CELLS * _GRID_CELLS * _ORI_BINS, -1).T
        desc = np.maximum(desc, 0.0)  # integral-image cancellation can dip below 0
        norms = np.linalg.norm(desc, axis=1)
        # Largest representable energy: every pixel at the gradient-magnitude
        # bound sqrt(2), all mass in a single orientation bin per cell.
        max_energy = np.sqrt(2.0) * b * b * _GRID_CELLS
        keep = norms >= eps_flat * max_energy
        out = np.zeros_like(desc)
        out[keep] = desc[keep] / norms[keep, None]
        all_vecs.append(out)
        all_x.append(gx + patch / 2.0)
        all_y.append(gy + patch / 2.0)
        all_s.append(np.full(gx.size, b, dtype=np.float64))

    return DescriptorSet(
        np.concatenate(all_vecs, axis=0),
        np.concatenate(all_x),
        np.concatenate(all_y),
        np.concatenate(all_s),
    )


def _squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = (
        np.sum(points * points, axis=1)[:, None]
        - 2.0 * points @ centers.T
        + np.sum(centers * centers, axis=1)[None, :]
    )
    return np.maximum(d, 0.0)


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = _squared_distances(points, centers[:1]).ravel()
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = points[idx]
        d2 = np.minimum(d2, _squared_distances(points, centers[j : j + 1]).ravel())
    return centers


def build_vocabulary(
    sets: Iterable[DescriptorSet],
    k: int,
    seed: int,
    max_iters: int = 100,
) -> Vocabulary:
    """Cluster all nonzero descriptors into a k-word vocabulary.

    Lloyd iterations with k-means++ initialization under ``seed``; stops when
    no assignment changes or after ``max_iters``.  Clusters that empty out
    are re-seeded with the point currently farthest from its center, so the
    result always has exactly k centers.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    pools = [s.nonzero_vectors() for s in sets]
    points = (
        np.concatenate([p for p in pools if p.size], axis=0)
        if any(p.size for p in pools)
        else np.zeros((0, DESCRIPTOR_DIM))
    )
    if points.shape[0] < k:
        raise InsufficientDataError(
            f"need at least {k} nonzero descriptors, got {points.shape[0]}"
        )

    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(points, k, rng)
    assign = np.full(points.shape[0], -1, dtype=np.int64)
    for _ in range(max_iters):
        d2 = _squared_distances(points, centers)
        new_assign = np.argmin(d2, axis=1)  # ties resolve to the lowest index
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            members = points[assign == j]
            if members.shape[0] > 0:
                centers[j] = members.mean(axis=0)
        # Re-seed empty clusters (ascending index) with the globally
        # farthest point from its assigned center.
        empties = [j for j in range(k) if not np.any(assign == j)]
        if empties:
            dist_own = d2[np.arange(points.shape[0]), assign].copy()
            for j in empties:
                far = int(np.argmax(dist_own))
                centers[j] = points[far]
                assign[far] = j
                dist_own[far] = -1.0
    return Vocabulary(centers, training_seed=seed)


def quantize(descriptors: DescriptorSet, vocab: Vocabulary) -> BowHistogram:
    """Assign each nonzero descriptor to its nearest center and normalize.

    Nearest is Euclidean; exact ties break toward the lowest center index.
    An empty (or all-flat) descriptor set yields the all-zero histogram.
    """
    if descriptors.vectors.shape[1] != vocab.centers.shape[1]:
        raise ShapeError(
            f"descriptor dim {descriptors.vectors.shape[1]} != "
            f"vocabulary dim {vocab.centers.shape[1]}"
        )
    points = descriptors.nonzero_vectors()
    if points.shape[0] == 0:
        return BowHistogram(np.zeros(vocab.k), 0)
    assign = np.argmin(_squared_distances(points, vocab.centers), axis=1)
    counts = np.bincount(assign, minlength=vocab.k).astype(np.float64)
    return BowHistogram(counts / counts.sum(), int(points.shape[0]))
