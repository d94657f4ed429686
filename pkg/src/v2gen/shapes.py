"""Procedural primitive meshes and the jittered toy dataset used by the
benchmark harness in place of a full downloaded corpus."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .mesh import TriangleMesh, normalize

__all__ = [
    "SHAPE_CLASSES",
    "ShapeSpec",
    "box",
    "icosphere",
    "cylinder",
    "cone",
    "torus",
    "make_shape",
    "make_toy_dataset",
]

SHAPE_CLASSES = ("box", "icosphere", "cylinder", "cone", "torus")


@dataclass(frozen=True)
class ShapeSpec:
    shape_class: str
    scale: tuple[float, float, float]  # per-axis, in [0.7, 1.3]
    rotation: float  # about the vertical (z) axis, radians
    seed: int


def box() -> TriangleMesh:
    """Axis-aligned cube, side 1, centered at the origin; 12 triangles."""
    corners = np.array(
        [[x, y, z] for x in (-0.5, 0.5) for y in (-0.5, 0.5) for z in (-0.5, 0.5)]
    )
    quads = [
        (0, 1, 3, 2),  # -x
        (4, 6, 7, 5),  # +x
        (0, 4, 5, 1),  # -y
        (2, 3, 7, 6),  # +y
        (0, 2, 6, 4),  # -z
        (1, 5, 7, 3),  # +z
    ]
    tris = []
    for a, b, c, d in quads:
        tris.append((a, b, c))
        tris.append((a, c, d))
    return TriangleMesh(corners, np.array(tris))


def icosphere(subdivisions: int = 3, radius: float = 0.5) -> TriangleMesh:
    """Icosahedron subdivided `subdivisions` times, vertices on the sphere."""
    p = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [
        (-1, p, 0), (1, p, 0), (-1, -p, 0), (1, -p, 0),
        (0, -1, p), (0, 1, p), (0, -1, -p), (0, 1, -p),
        (p, 0, -1), (p, 0, 1), (-p, 0, -1), (-p, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.array(v, dtype=np.float64) for v in verts]
    verts = [v / np.linalg.norm(v) for v in verts]

    for _ in range(subdivisions):
        midpoint_cache: dict[tuple[int, int], int] = {}

        def midpoint(i: int, j: int) -> int:
            key = (i, j) if i < j else (j, i)
            if key not in midpoint_cache:
                mid = verts[i] + verts[j]
                verts.append(mid / np.linalg.norm(mid))
                midpoint_cache[key] = len(verts) - 1
            return midpoint_cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces

    return TriangleMesh(np.array(verts) * radius, np.array(faces))


def _circle(segments: int, radius: float, z: float) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(segments) / segments
    return np.column_stack(
        [radius * np.cos(angles), radius * np.sin(angles), np.full(segments, z)]
    )


def cylinder(segments: int = 64, radius: float = 0.5, height: float = 1.0) -> TriangleMesh:
    """Capped cylinder along z, centered at the origin."""
    bottom = _circle(segments, radius, -height / 2)
    top = _circle(segments, radius, height / 2)
    verts = np.vstack([bottom, top, [[0, 0, -height / 2]], [[0, 0, height / 2]]])
    cb, ct = 2 * segments, 2 * segments + 1
    tris = []
    for i in range(segments):
        j = (i + 1) % segments
        tris += [(i, j, segments + i), (j, segments + j, segments + i)]  # side
        tris.append((cb, j, i))  # bottom cap
        tris.append((ct, segments + i, segments + j))  # top cap
    return TriangleMesh(verts, np.array(tris))


def cone(segments: int = 64, radius: float = 0.5, height: float = 1.0) -> TriangleMesh:
    """Cone along z with base cap, centered at the origin."""
    base = _circle(segments, radius, -height / 2)
    verts = np.vstack([base, [[0, 0, height / 2]], [[0, 0, -height / 2]]])
    apex, cb = segments, segments + 1
    tris = []
    for i in range(segments):
        j = (i + 1) % segments
        tris.append((i, j, apex))
        tris.append((cb, j, i))
    return TriangleMesh(verts, np.array(tris))


def torus(
    major_segments: int = 32,
    minor_segments: int = 16,
    major_radius: float = 0.35,
    minor_radius: float = 0.15,
) -> TriangleMesh:
    """Torus in the xy plane, centered at the origin."""
    u = 2.0 * np.pi * np.arange(major_segments) / major_segments
    v = 2.0 * np.pi * np.arange(minor_segments) / minor_segments
    uu, vv = np.meshgrid(u, v, indexing="ij")
    ring = major_radius + minor_radius * np.cos(vv)
    verts = np.column_stack(
        [
            (ring * np.cos(uu)).ravel(),
            (ring * np.sin(uu)).ravel(),
            (minor_radius * np.sin(vv)).ravel(),
        ]
    )
    tris = []
    for i in range(major_segments):
        for j in range(minor_segments):
            a = i * minor_segments + j
            b = ((i + 1) % major_segments) * minor_segments + j
            c = i * minor_segments + (j + 1) % minor_segments
            d = ((i + 1) % major_segments) * minor_segments + (j + 1) % minor_segments
            tris += [(a, b, c), (b, d, c)]
    return TriangleMesh(verts, np.array(tris))


_BUILDERS = {
    "box": box,
    "icosphere": lambda: icosphere(subdivisions=3),
    "cylinder": lambda: cylinder(segments=64),
    "cone": lambda: cone(segments=64),
    "torus": lambda: torus(32, 16),
}


def make_shape(spec: ShapeSpec) -> TriangleMesh:
    """Build, jitter (per-axis scale + small z rotation), and normalize."""
    if spec.shape_class not in _BUILDERS:
        raise ValueError(f"unknown shape class {spec.shape_class!r}")
    base = _BUILDERS[spec.shape_class]()
    verts = base.vertices * np.asarray(spec.scale)
    c, s = math.cos(spec.rotation), math.sin(spec.rotation)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    verts = verts @ rot.T
    return normalize(TriangleMesh(verts, base.triangles))


def make_toy_dataset(
    classes: Sequence[str], per_class: int, seed: int
) -> list[tuple[TriangleMesh, str]]:
    """Deterministic labeled meshes: `per_class` jittered instances of each
    class, normalized. Jitter is per-axis scale in [0.7, 1.3] and rotation
    about the vertical axis in [-pi/12, pi/12]."""
    if not classes:
        raise ValueError("class list is empty")
    if per_class < 2:
        raise ValueError("per_class must be >= 2")
    for cls in classes:
        if cls not in _BUILDERS:
            raise ValueError(f"unknown shape class {cls!r}")
    rng = np.random.default_rng(seed)
    dataset = []
    for cls in classes:
        for _ in range(per_class):
            spec = ShapeSpec(
                shape_class=cls,
                scale=tuple(rng.uniform(0.7, 1.3, size=3)),
                rotation=float(rng.uniform(-math.pi / 12, math.pi / 12)),
                seed=seed,
            )
            dataset.append((make_shape(spec), cls))
    return dataset
