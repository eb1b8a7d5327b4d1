"""Planar geometry: rectangular windows, directed sets, rotations and the
translational edge-correction weight.

All functions accept single vectors of shape ``(2,)`` or stacks of shape
``(m, 2)`` and broadcast accordingly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle ``[x_min, x_max] x [y_min, y_max]``."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        vals = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"window bounds must be finite, got {vals}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate window {vals}")

    @classmethod
    def square(cls, side: float, centered: bool = True) -> "Window":
        if centered:
            h = side / 2.0
            return cls(-h, h, -h, h)
        return cls(0.0, side, 0.0, side)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.width + self.height)

    def dilated_area(self, radius: float) -> float:
        """Area of the Minkowski sum of the window with a disk."""
        return self.area + self.perimeter * radius + np.pi * radius**2

    def expand(self, margin: float) -> "Window":
        return Window(self.x_min - margin, self.x_max + margin,
                      self.y_min - margin, self.y_max + margin)

    def contains(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        return ((x >= self.x_min) & (x <= self.x_max)
                & (y >= self.y_min) & (y <= self.y_max))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.x_max, self.y_min, self.y_max)


def polar_angle(z) -> np.ndarray:
    """Angle of ``z`` in ``[0, 2*pi)``."""
    z = np.asarray(z, dtype=float)
    return np.mod(np.arctan2(z[..., 1], z[..., 0]), TWO_PI)


def angular_distance(theta, alpha) -> np.ndarray:
    """Distance on the circle between two angles, in ``[0, pi]``."""
    d = np.mod(np.asarray(theta, dtype=float) - alpha, TWO_PI)
    return np.minimum(d, TWO_PI - d)


def rotate(z, phi) -> np.ndarray:
    """Rotate vectors counter-clockwise about the origin.

    ``phi`` may be a scalar or one angle per vector.
    """
    z = np.asarray(z, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    x, y = z[..., 0], z[..., 1]
    return np.stack([x * c - y * s, x * s + y * c], axis=-1)


def translation_overlap(window: Window, z) -> np.ndarray:
    """Area of ``W ∩ (W + z)`` for a rectangular window."""
    z = np.asarray(z, dtype=float)
    dx = np.maximum(0.0, window.width - np.abs(z[..., 0]))
    dy = np.maximum(0.0, window.height - np.abs(z[..., 1]))
    return dx * dy


# Directed sets. Membership is closed on every boundary; the origin is a
# member of every set (its angle is undefined but it lies in each closure).

@dataclass(frozen=True)
class Sector:
    alpha: float
    eps: float
    r: float

    def __post_init__(self):
        if not (0.0 <= 2.0 * self.eps <= np.pi) or self.r < 0:
            raise ValueError(f"invalid sector {self}")

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        norm = np.hypot(z[..., 0], z[..., 1])
        inside = angular_distance(polar_angle(z), self.alpha) <= self.eps
        return (norm <= self.r) & (inside | (norm == 0.0))


@dataclass(frozen=True)
class DoubleConeSector:
    alpha: float
    eps: float
    r: float

    def __post_init__(self):
        if not (0.0 < self.eps <= np.pi / 2) or self.r < 0:
            raise ValueError(f"invalid double cone {self}")

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        norm = np.hypot(z[..., 0], z[..., 1])
        theta = polar_angle(z)
        inside = ((angular_distance(theta, self.alpha) <= self.eps)
                  | (angular_distance(theta, self.alpha + np.pi) <= self.eps))
        return (norm <= self.r) & (inside | (norm == 0.0))


@dataclass(frozen=True)
class Cylinder:
    alpha: float
    w: float
    r: float

    def __post_init__(self):
        if self.w < 0 or self.r < 0:
            raise ValueError(f"invalid cylinder {self}")

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        c, s = np.cos(self.alpha), np.sin(self.alpha)
        along = z[..., 0] * c + z[..., 1] * s
        across = -z[..., 0] * s + z[..., 1] * c
        return (np.abs(along) <= self.r) & (np.abs(across) <= self.w)


@dataclass(frozen=True)
class Ball:
    r: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"invalid ball {self}")

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.hypot(z[..., 0], z[..., 1]) <= self.r


DirectedSet = Sector | DoubleConeSector | Cylinder | Ball


def contains(dset: DirectedSet, z) -> np.ndarray:
    """Closed membership test of ``z`` in a directed set."""
    return dset.contains(z)
