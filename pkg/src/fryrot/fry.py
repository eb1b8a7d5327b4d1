"""Fry points (pairwise difference vectors) and their random rotations."""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .geometry import Window, rotate
from .sampling import as_generator


class RotationScheme(str, Enum):
    INDIVIDUAL = "individual"
    PAIRWISE = "pairwise"
    GROUPWISE = "groupwise"

    @classmethod
    def parse(cls, value) -> "RotationScheme":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "").replace("_", "")
        for s in cls:
            if s.value == key:
                return s
        raise ValueError(f"unknown rotation scheme {value!r}")


@dataclass
class FryPattern:
    """Ordered difference vectors ``z = x_j - x_i`` of a point pattern.

    ``group_of[k] = i`` is the origin point of vector ``k`` and
    ``target_of[k] = j`` its end point. ``pair_of[k]`` indexes the vector
    ``x_i - x_j`` (``-1`` if it was clipped away); it is ``None`` once the
    pattern has lost its point symmetry.
    """

    vectors: np.ndarray
    group_of: np.ndarray
    target_of: np.ndarray
    pair_of: np.ndarray | None
    source_n: int
    window: Window

    def __len__(self):
        return len(self.vectors)

    @property
    def norms(self) -> np.ndarray:
        return np.hypot(self.vectors[:, 0], self.vectors[:, 1])

    @property
    def symmetric(self) -> bool:
        return self.pair_of is not None and bool(np.all(self.pair_of >= 0))

    def clip(self, r_max: float) -> "FryPattern":
        """Drop vectors longer than ``r_max``; pair links are re-indexed."""
        keep = self.norms <= r_max
        pair = None
        if self.pair_of is not None:
            new_index = np.full(len(self), -1)
            new_index[keep] = np.arange(int(keep.sum()))
            old = self.pair_of[keep]
            pair = np.where(old >= 0, new_index[np.maximum(old, 0)], -1)
        return FryPattern(self.vectors[keep], self.group_of[keep], self.target_of[keep],
                          pair, self.source_n, self.window)


def fry_points(pattern, r_max: float | None = None) -> FryPattern:
    """All ``n (n - 1)`` ordered difference vectors of a pattern.

    Vectors are laid out by origin point ``i`` and then by target ``j``.
    With ``r_max`` given, longer vectors are dropped.
    """
    pts = np.asarray(pattern.points, dtype=float)
    n = len(pts)
    if n < 2:
        raise ValueError(f"need at least 2 points for Fry points, got {n}")
    ii, jj = np.nonzero(~np.eye(n, dtype=bool))
    vectors = pts[jj] - pts[ii]
    # position of (j, i) in the row-major off-diagonal layout
    pair = jj * (n - 1) + np.where(ii < jj, ii, ii - 1)
    fry = FryPattern(vectors, ii, jj, pair, n, pattern.window)
    return fry if r_max is None else fry.clip(r_max)


def _pair_index(fry: FryPattern) -> np.ndarray:
    """Index of the unordered pair {i, j} among ``n (n - 1) / 2`` pairs."""
    lo = np.minimum(fry.group_of, fry.target_of)
    hi = np.maximum(fry.group_of, fry.target_of)
    n = fry.source_n
    return lo * n - lo * (lo + 1) // 2 + (hi - lo - 1)


def rotation_angles(fry: FryPattern, scheme, rng) -> np.ndarray:
    """One rotation angle per vector of ``fry`` under ``scheme``.

    Angles are drawn for the full (unclipped) index space of the source
    pattern, so a clipped pattern receives exactly the angles its vectors
    would get in the full pattern.
    """
    scheme = RotationScheme.parse(scheme)
    gen = as_generator(rng)
    n = fry.source_n
    if scheme is RotationScheme.GROUPWISE:
        return gen.uniform(0.0, 2 * np.pi, n)[fry.group_of]
    if scheme is RotationScheme.PAIRWISE:
        if fry.pair_of is None or np.any(fry.pair_of < 0):
            raise ValueError("pairwise rotation needs intact pair links")
        return gen.uniform(0.0, 2 * np.pi, n * (n - 1) // 2)[_pair_index(fry)]
    full = gen.uniform(0.0, 2 * np.pi, n * (n - 1))
    return full[fry.group_of * (n - 1)
                + np.where(fry.target_of < fry.group_of, fry.target_of, fry.target_of - 1)]


def resample(fry: FryPattern, scheme, rng=None, angles=None) -> FryPattern:
    """Randomly rotate Fry points individually, by pair, or by origin group.

    ``angles`` overrides the random draw (one angle per vector). Pairwise
    output stays point-symmetric; the other schemes clear ``pair_of``.
    """
    scheme = RotationScheme.parse(scheme)
    if angles is None:
        angles = rotation_angles(fry, scheme, rng)
    elif scheme is RotationScheme.PAIRWISE and (fry.pair_of is None or np.any(fry.pair_of < 0)):
        raise ValueError("pairwise rotation needs intact pair links")
    out = rotate(fry.vectors, angles)
    pair = fry.pair_of if scheme is RotationScheme.PAIRWISE else None
    return replace(fry, vectors=out, pair_of=pair)
