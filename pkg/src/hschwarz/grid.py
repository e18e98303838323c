"""Deterministic sample grids inside the unit disk."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

DEFAULT_RADII = tuple(round(0.1 * k, 10) for k in range(1, 9))
DEFAULT_ANGLES = 16


@dataclass(frozen=True)
class GridSpec:
    """Polar grid ``radii x angles`` plus optional explicit points.

    Points are ordered by radius, then by angle ``2*pi*k/angles``; extra
    points come last in the order given.
    """

    radii: tuple = DEFAULT_RADII
    angles: int = DEFAULT_ANGLES
    extra_points: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        object.__setattr__(self, "extra_points", tuple(complex(p) for p in self.extra_points))
        if any(not (0.0 < r < 1.0) for r in self.radii):
            raise ValueError("grid radii must lie in (0, 1)")
        if self.angles < 1:
            raise ValueError("grid needs at least one angle")
        if any(abs(p) >= 1.0 for p in self.extra_points):
            raise ValueError("extra grid points must lie strictly inside the unit disk")

    @classmethod
    def uniform(cls, step: float, max_radius: float = 0.8, angles: int = DEFAULT_ANGLES, **kw):
        n = int(round(max_radius / step))
        radii = tuple(round(step * k, 12) for k in range(1, n + 1) if step * k <= max_radius + 1e-12)
        return cls(radii=radii, angles=angles, **kw)

    def capped(self, max_radius: float) -> "GridSpec":
        return GridSpec(
            radii=tuple(r for r in self.radii if r <= max_radius + 1e-12),
            angles=self.angles,
            extra_points=tuple(p for p in self.extra_points if abs(p) <= max_radius + 1e-12),
        )

    def points(self) -> np.ndarray:
        return _points(self.radii, self.angles, self.extra_points)

    def __len__(self):
        return len(self.radii) * self.angles + len(self.extra_points)


@lru_cache(maxsize=64)
def _points(radii, angles, extra):
    theta = 2.0 * np.pi * np.arange(angles) / angles
    ring = np.exp(1j * theta)
    pts = np.concatenate([r * ring for r in radii] + [np.asarray(extra, dtype=np.complex128)])
    pts.setflags(write=False)
    return pts


DEFAULT_GRID = GridSpec()
#: Finer grid used for soundness re-checks of Equal verdicts.
FINE_GRID = GridSpec.uniform(0.05, max_radius=0.8, angles=32)


def default_points() -> np.ndarray:
    return DEFAULT_GRID.points()


def scan_order(points: np.ndarray) -> np.ndarray:
    """Indices sorting ``points`` by modulus, then by angle in [0, 2*pi)."""
    ang = np.mod(np.angle(points), 2.0 * np.pi)
    return np.lexsort((np.round(ang, 12), np.round(np.abs(points), 12)))
