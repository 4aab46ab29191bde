"""Arena geometry, static intensity fields and noisy sensing.

Positions are ``(..., 2)`` float arrays in arena units; the arena is the
closed rectangle ``[0, width] x [0, height]``.  Field shape parameters that
locate features (apex, peak centres) are given as fractions of the arena
size so the same field definition can be reused across arena sweeps.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

GROUND_TRUTH_RESOLUTION = 512


@dataclass(frozen=True)
class Arena:
    width: float = 1.4
    height: float = 1.4

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"arena dimensions must be positive, got {self.width}x{self.height}")

    @property
    def size(self) -> np.ndarray:
        return np.array([self.width, self.height])

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (
            (x[..., 0] >= 0.0)
            & (x[..., 0] <= self.width)
            & (x[..., 1] >= 0.0)
            & (x[..., 1] <= self.height)
        )


class FieldKind(str, enum.Enum):
    CONE = "cone"
    MULTIPEAK = "multipeak"
    PLANE = "plane"


@dataclass(frozen=True)
class Peak:
    """Isotropic Gaussian bump; centre and width are arena fractions."""

    cx: float
    cy: float
    height: float
    width: float


DEFAULT_PEAKS = (
    Peak(0.25, 0.70, 1.0, 0.12),
    Peak(0.70, 0.75, 0.7, 0.15),
    Peak(0.65, 0.25, 0.85, 0.10),
)


@dataclass(frozen=True)
class FieldSpec:
    """Static scalar intensity field plus its sensing-noise coefficient.

    ``cone``: ``height - slope * |x - apex|``.  With ``slope=None`` the slope
    is chosen so the field minimum over the arena is exactly ``offset``.
    ``multipeak``: sum of Gaussian ``peaks``.
    ``plane``: ``gradient . x`` (useful for calibration and tests).
    ``offset`` is added to every kind.
    """

    kind: FieldKind = FieldKind.CONE
    height: float = 1.0
    slope: float | None = None
    apex: tuple[float, float] = (0.5, 0.5)
    peaks: tuple[Peak, ...] = DEFAULT_PEAKS
    gradient: tuple[float, float] = (1.0, 0.0)
    offset: float = 0.0
    sigma: float = 0.025

    def __post_init__(self):
        object.__setattr__(self, "kind", FieldKind(self.kind))
        object.__setattr__(self, "apex", tuple(float(v) for v in self.apex))
        object.__setattr__(self, "gradient", tuple(float(v) for v in self.gradient))
        object.__setattr__(
            self, "peaks", tuple(p if isinstance(p, Peak) else Peak(**p) for p in self.peaks)
        )
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.slope is not None and not np.isfinite(self.slope):
            raise ValueError("cone slope must be finite")

    @classmethod
    def cone(cls, **kw) -> FieldSpec:
        return cls(kind=FieldKind.CONE, **kw)

    @classmethod
    def multipeak(cls, **kw) -> FieldSpec:
        return cls(kind=FieldKind.MULTIPEAK, **kw)

    @classmethod
    def plane(cls, gx: float = 1.0, gy: float = 0.0, **kw) -> FieldSpec:
        return cls(kind=FieldKind.PLANE, gradient=(gx, gy), **kw)

    def cone_slope(self, arena: Arena) -> float:
        if self.slope is not None:
            return self.slope
        apex = np.asarray(self.apex) * arena.size
        corners = np.array([[0, 0], [arena.width, 0], [0, arena.height], [arena.width, arena.height]])
        reach = np.max(np.linalg.norm(corners - apex, axis=1))
        return self.height / reach


def field_values(field: FieldSpec, arena: Arena, x) -> np.ndarray:
    """Evaluate the field at positions ``x`` without bounds checks."""
    x = np.asarray(x, dtype=float)
    if field.kind is FieldKind.CONE:
        apex = np.asarray(field.apex) * arena.size
        r = np.hypot(x[..., 0] - apex[0], x[..., 1] - apex[1])
        g = field.height - field.cone_slope(arena) * r
    elif field.kind is FieldKind.MULTIPEAK:
        g = np.zeros(x.shape[:-1])
        scale = min(arena.width, arena.height)
        for p in field.peaks:
            r2 = (x[..., 0] - p.cx * arena.width) ** 2 + (x[..., 1] - p.cy * arena.height) ** 2
            g = g + p.height * np.exp(-r2 / (2.0 * (p.width * scale) ** 2))
    else:
        g = field.gradient[0] * x[..., 0] + field.gradient[1] * x[..., 1]
    return g + field.offset


def intensity_at(field: FieldSpec, arena: Arena, x):
    """Noise-free field value at ``x``; raises ``ValueError`` outside the arena."""
    x = np.asarray(x, dtype=float)
    if not np.all(arena.contains(x)):
        raise ValueError(f"position {x.tolist()} lies outside the {arena.width}x{arena.height} arena")
    g = field_values(field, arena, x)
    return float(g) if g.ndim == 0 else g


def sense(field: FieldSpec, arena: Arena, x, rng: np.random.Generator):
    """Noisy measurement ``g(x) + sigma * N(0, 1)``.

    One normal draw is consumed per position even when ``sigma == 0`` so the
    random stream layout does not depend on the noise level.
    """
    g = intensity_at(field, arena, x)
    n = rng.standard_normal(np.shape(g))
    if field.sigma == 0.0:
        return g
    z = g + field.sigma * n
    return float(z) if np.ndim(z) == 0 else z


def ground_truth_mean(field: FieldSpec, arena: Arena, resolution: int = GROUND_TRUTH_RESOLUTION) -> float:
    """Arena-average intensity by the midpoint rule on a ``resolution``-square grid."""
    xs = (np.arange(resolution) + 0.5) * (arena.width / resolution)
    ys = (np.arange(resolution) + 0.5) * (arena.height / resolution)
    grid = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
    return float(field_values(field, arena, grid).mean())


def fold_into(arena: Arena, p) -> tuple[np.ndarray, np.ndarray]:
    """Specularly fold positions back into the arena.

    Returns the folded positions and a boolean ``(..., 2)`` array that is
    True on every axis that was mirrored an odd number of times.
    """
    p = np.array(p, dtype=float, copy=True)
    flipped = np.zeros(p.shape, dtype=bool)
    for axis, upper in enumerate((arena.width, arena.height)):
        q = p[..., axis]
        f = flipped[..., axis]
        while True:
            low, high = q < 0.0, q > upper
            if not (low.any() or high.any()):
                break
            q[low] = -q[low]
            q[high] = 2.0 * upper - q[high]
            f ^= low | high
    return p, flipped


def reflect_step(arena: Arena, x, step) -> np.ndarray:
    """Move from ``x`` by ``step`` with reflecting walls."""
    x = np.asarray(x, dtype=float)
    target = x + np.asarray(step, dtype=float)
    if np.all(arena.contains(target)):
        return target
    return fold_into(arena, target)[0]
