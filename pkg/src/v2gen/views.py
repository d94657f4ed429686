"""View-center sampling on the containing sphere, tangent-plane ray grids,
and the fixed-pixel-budget configuration continuum.

A configuration "m x n x x x y" places m*n view centers on the diameter-1
sphere (m latitude rows, n longitude columns) and shoots an x*y grid of
parallel rays from each tangent plane. The continuum trades views against
pixels per view while the total pixel count stays constant.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SPHERE_RADIUS",
    "V2Config",
    "SphericalDirection",
    "ViewFrame",
    "ConfigError",
    "sample_view_centers",
    "build_view_frame",
    "grid_ray_origins",
    "enumerate_continuum",
]

SPHERE_RADIUS = 0.5


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SphericalDirection:
    theta: float  # azimuthal, [0, 2*pi)
    phi: float  # polar, (0, pi)

    def __post_init__(self):
        if not 0.0 <= self.theta < 2.0 * math.pi:
            raise ValueError(f"theta {self.theta} outside [0, 2pi)")
        if not 0.0 < self.phi < math.pi:
            raise ValueError(f"phi {self.phi} outside (0, pi)")


_CONFIG_RE = re.compile(r"^(\d+)x(\d+)x(\d+)x(\d+)(?:c(\d+))?$")


@dataclass(frozen=True)
class V2Config:
    """Generation parameters: view rows m, view columns n, view width x,
    view height y, grid spacing d (sphere-diameter units), channels nc."""

    m: int
    n: int
    x: int
    y: int
    d: float = 0.0  # defaults to 1/x
    nc: int = 1

    def __post_init__(self):
        for name in ("m", "n", "x", "y", "nc"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        d = self.d if self.d else 1.0 / self.x
        if abs(d - 1.0 / self.x) > 1e-12:
            raise ConfigError(f"d={d} must equal 1/x={1.0 / self.x}")
        object.__setattr__(self, "d", float(d))

    @property
    def nv(self) -> int:
        return self.m * self.n

    @property
    def pv(self) -> int:
        return self.x * self.y

    @property
    def c(self) -> int:
        return self.nv * self.pv * self.nc

    def to_string(self) -> str:
        s = f"{self.m}x{self.n}x{self.x}x{self.y}"
        return s if self.nc == 1 else f"{s}c{self.nc}"

    @classmethod
    def from_string(cls, text: str) -> "V2Config":
        match = _CONFIG_RE.match(text.strip())
        if match is None:
            raise ConfigError(
                f"bad config string {text!r}; expected MxNxXxY or MxNxXxYcK"
            )
        m, n, x, y = (int(g) for g in match.groups()[:4])
        nc = int(match.group(5)) if match.group(5) else 1
        return cls(m=m, n=n, x=x, y=y, nc=nc)


@dataclass(frozen=True)
class ViewFrame:
    """One orthographic camera: tangency point on the sphere plus an
    orthonormal basis with right x up = normal and normal aimed at the origin."""

    center: np.ndarray
    right: np.ndarray
    up: np.ndarray
    normal: np.ndarray


def sample_view_centers(m: int, n: int) -> list[tuple[SphericalDirection, np.ndarray]]:
    """m*n centers in row-major order (latitude row outer, longitude inner).

    Latitude rows use midpoints u_i = (i+0.5)/m mapped through
    phi = arccos(1-2u) so rows carve equal-area bands (no polar clustering);
    columns are theta_j = 2*pi*j/n.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    out = []
    for i in range(m):
        u = (i + 0.5) / m
        phi = math.acos(1.0 - 2.0 * u)
        sin_phi, cos_phi = math.sin(phi), math.cos(phi)
        for j in range(n):
            theta = 2.0 * math.pi * j / n
            point = SPHERE_RADIUS * np.array(
                [sin_phi * math.cos(theta), sin_phi * math.sin(theta), cos_phi]
            )
            out.append((SphericalDirection(theta, phi), point))
    return out


def build_view_frame(center: np.ndarray) -> ViewFrame:
    """Orthonormal frame at a sphere point, normal aimed inward.

    Up hint is +Z, switching to +X when the center is (anti)polar.
    """
    center = np.asarray(center, dtype=np.float64)
    norm = float(np.linalg.norm(center))
    if norm == 0.0:
        raise ValueError("view center must be nonzero")
    normal = -center / norm
    if abs(center[2]) / norm > 1.0 - 1e-9:
        up_hint = np.array([1.0, 0.0, 0.0])
    else:
        up_hint = np.array([0.0, 0.0, 1.0])
    right = np.cross(up_hint, normal)
    right /= np.linalg.norm(right)
    up = np.cross(normal, right)
    return ViewFrame(center=center, right=right, up=up, normal=normal)


def grid_ray_origins(frame: ViewFrame, x: int, y: int, d: float) -> np.ndarray:
    """(y, x, 3) ray origins on the tangent plane; grid cell (y//2, x//2)
    coincides with the view center. All rays share direction frame.normal."""
    if x < 1 or y < 1:
        raise ValueError("x and y must be >= 1")
    if d <= 0:
        raise ValueError("d must be positive")
    cols = (np.arange(x) - x // 2) * d
    rows = (np.arange(y) - y // 2) * d
    return (
        frame.center[None, None, :]
        + cols[None, :, None] * frame.right[None, None, :]
        + rows[:, None, None] * frame.up[None, None, :]
    )


def view_rays(config: V2Config) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ray setup for every view of a configuration.

    Returns (origins, normals): origins is (NV, y, x, 3) and normals is
    (NV, 3), matching sample_view_centers / build_view_frame /
    grid_ray_origins applied per view.
    """
    m, n, x, y, d = config.m, config.n, config.x, config.y, config.d
    u = (np.arange(m) + 0.5) / m
    phi = np.arccos(1.0 - 2.0 * u)
    theta = 2.0 * np.pi * np.arange(n) / n
    sin_phi, cos_phi = np.sin(phi), np.cos(phi)
    centers = SPHERE_RADIUS * np.stack(
        [
            np.outer(sin_phi, np.cos(theta)),
            np.outer(sin_phi, np.sin(theta)),
            np.broadcast_to(cos_phi[:, None], (m, n)),
        ],
        axis=-1,
    ).reshape(m * n, 3)

    norms = np.linalg.norm(centers, axis=1, keepdims=True)
    normals = -centers / norms
    polar = np.abs(centers[:, 2:3]) / norms > 1.0 - 1e-9
    up_hint = np.where(polar, [1.0, 0.0, 0.0], [0.0, 0.0, 1.0])
    right = np.cross(up_hint, normals)
    right /= np.linalg.norm(right, axis=1, keepdims=True)
    up = np.cross(normals, right)

    cols = (np.arange(x) - x // 2) * d
    rows = (np.arange(y) - y // 2) * d
    origins = (
        centers[:, None, None, :]
        + cols[None, None, :, None] * right[:, None, None, :]
        + rows[None, :, None, None] * up[:, None, None, :]
    )
    return origins, normals


def enumerate_continuum(base: V2Config) -> list[V2Config]:
    """All configurations reachable from `base` by subdividing views,
    one per divisor f of base.x: (m*f, n*f, x/f, y/f). The pixel budget
    C is preserved exactly; the last element is the one-pixel-per-view end."""
    if base.x != base.y:
        raise ConfigError(f"continuum requires square views, got {base.x}x{base.y}")
    divisors = [f for f in range(1, base.x + 1) if base.x % f == 0]
    chain = [
        V2Config(m=base.m * f, n=base.n * f, x=base.x // f, y=base.y // f, nc=base.nc)
        for f in divisors
    ]
    for cfg in chain:
        assert cfg.c == base.c
    return chain
