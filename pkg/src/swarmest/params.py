"""Simulation parameters and their defaults."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, fields, replace
from dataclasses import field as dc_field

from .environment import Arena, FieldSpec


class SwitchMode(str, enum.Enum):
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


class GradientMode(str, enum.Enum):
    BASIC = "basic"
    EXTENDED = "extended"


class EstimateSource(str, enum.Enum):
    """Which per-agent quantity stands in for an opinion before switching."""

    SENSE = "sense"
    ZAVG = "zavg"


@dataclass(frozen=True)
class Patch:
    """Initial placement rectangle.

    ``origin`` is the lower-left corner in arena units; ``None`` centres the
    patch in whatever arena it is used with.
    """

    width: float = 0.7
    height: float = 0.7
    origin: tuple[float, float] | None = None

    def __post_init__(self):
        if self.origin is not None:
            object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        if not (self.width > 0 and self.height > 0):
            raise ValueError("patch dimensions must be positive")

    def corner(self, arena: Arena) -> tuple[float, float]:
        if self.origin is None:
            return (0.5 * (arena.width - self.width), 0.5 * (arena.height - self.height))
        return self.origin

    def inside(self, arena: Arena) -> bool:
        x0, y0 = self.corner(arena)
        return x0 >= 0 and y0 >= 0 and x0 + self.width <= arena.width and y0 + self.height <= arena.height


@dataclass(frozen=True)
class SimParams:
    n_agents: int = 100
    arena: Arena = dc_field(default_factory=Arena)
    patch: Patch = dc_field(default_factory=Patch)
    comm_range: float = 0.30
    r_psi: float = 0.1
    r_lambda: float = 0.25
    step_size: float = 0.002
    alpha: float = 0.99
    beta: float = 0.99
    beta_lag: float = 0.9
    delta_prec: float = 1e-6
    delta_mem: int = 100
    t_f: int = 5000
    switch_mode: SwitchMode = SwitchMode.FIXED
    t_sw: int = 2500
    gradient_mode: GradientMode = GradientMode.EXTENDED
    field: FieldSpec = dc_field(default_factory=FieldSpec)
    seed: int = 0
    memory_init: EstimateSource = EstimateSource.SENSE
    estimate_before_switch: EstimateSource = EstimateSource.SENSE
    neighbor_search: str = "brute"
    record_stride: int = 1

    def __post_init__(self):
        for name, kind in _ENUM_FIELDS:
            object.__setattr__(self, name, kind(getattr(self, name)))
        if isinstance(self.arena, dict):
            object.__setattr__(self, "arena", Arena(**self.arena))
        if isinstance(self.patch, dict):
            object.__setattr__(self, "patch", Patch(**self.patch))
        if isinstance(self.field, dict):
            object.__setattr__(self, "field", FieldSpec(**self.field))
        self.validate()

    def validate(self) -> None:
        if self.n_agents < 1:
            raise ValueError("n_agents must be >= 1")
        for name in ("r_psi", "r_lambda", "alpha", "beta", "beta_lag"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.step_size < 0:
            raise ValueError("step_size must be >= 0")
        if self.comm_range <= 0:
            raise ValueError("comm_range must be > 0")
        if self.t_f < 0 or self.t_sw < 0 or self.delta_mem < 0:
            raise ValueError("t_f, t_sw and delta_mem must be non-negative")
        if self.delta_prec < 0:
            raise ValueError("delta_prec must be >= 0")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if self.neighbor_search not in ("brute", "grid"):
            raise ValueError(f"unknown neighbor_search {self.neighbor_search!r}")
        if not self.patch.inside(self.arena):
            raise ValueError(
                f"placement patch {self.patch} does not fit inside arena {self.arena.width}x{self.arena.height}"
            )

    @property
    def sigma(self) -> float:
        return self.field.sigma

    def with_sigma(self, sigma: float) -> SimParams:
        return replace(self, field=replace(self.field, sigma=sigma))

    def to_dict(self) -> dict:
        return _plain(asdict(self))

    @classmethod
    def from_dict(cls, data: dict) -> SimParams:
        data = dict(data)
        sigma = data.pop("sigma", None)
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown parameter(s): {sorted(unknown)}")
        params = cls(**data)
        return params if sigma is None else params.with_sigma(float(sigma))


_ENUM_FIELDS = (
    ("switch_mode", SwitchMode),
    ("gradient_mode", GradientMode),
    ("memory_init", EstimateSource),
    ("estimate_before_switch", EstimateSource),
)


def _plain(obj):
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj
