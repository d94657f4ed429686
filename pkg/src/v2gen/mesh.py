"""Triangle mesh container, OFF/OBJ parsing, and normalization.

Meshes are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

__all__ = [
    "TriangleMesh",
    "Aabb",
    "MeshError",
    "MeshParseError",
    "parse_off",
    "parse_obj",
    "load_mesh",
    "serialize_off",
    "bounding_box",
    "normalize",
]

NORMALIZED_LONGEST_SIDE = 0.4


class MeshError(ValueError):
    pass


class MeshParseError(MeshError):
    """Raised on malformed input; carries the 1-based source line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Aabb:
    min: np.ndarray
    max: np.ndarray

    @property
    def extent(self) -> np.ndarray:
        return self.max - self.min

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.min + self.max)


@dataclass(frozen=True)
class TriangleMesh:
    """Indexed triangle soup.

    vertices: (V, 3) float64, triangles: (T, 3) int64 into vertices.
    """

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        t = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64))
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError(f"vertices must be (V, 3), got {v.shape}")
        if t.size == 0:
            t = t.reshape(0, 3)
        if t.ndim != 2 or t.shape[1] != 3:
            raise MeshError(f"triangles must be (T, 3), got {t.shape}")
        if not np.all(np.isfinite(v)):
            raise MeshError("non-finite vertex coordinate")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise MeshError("triangle index out of range")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)


def bounding_box(mesh: TriangleMesh) -> Aabb:
    if mesh.num_vertices == 0:
        raise MeshError("cannot compute bounding box of empty mesh")
    return Aabb(mesh.vertices.min(axis=0), mesh.vertices.max(axis=0))


def normalize(mesh: TriangleMesh) -> TriangleMesh:
    """Center the bounding box at the origin and scale the longest side to 0.4.

    The result fits inside the diameter-1 containing sphere (worst case
    circumscribed diameter 0.4*sqrt(3) ~ 0.69).
    """
    box = bounding_box(mesh)
    longest = float(box.extent.max())
    if longest <= 0.0:
        raise MeshError("mesh has zero extent; cannot normalize")
    scale = NORMALIZED_LONGEST_SIDE / longest
    verts = (mesh.vertices - box.center) * scale
    return TriangleMesh(verts, mesh.triangles)


def is_normalized(mesh: TriangleMesh, tol: float = 1e-6) -> bool:
    if mesh.num_vertices == 0:
        return False
    box = bounding_box(mesh)
    return (
        abs(float(box.extent.max()) - NORMALIZED_LONGEST_SIDE) <= tol
        and np.abs(box.center).max() <= tol
    )


def _fan_triangulate(indices: list[int]) -> list[tuple[int, int, int]]:
    return [(indices[0], indices[i], indices[i + 1]) for i in range(1, len(indices) - 1)]


def _iter_content_lines(text: str) -> Iterable[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_off(source: str | TextIO) -> TriangleMesh:
    """Parse OFF text. Polygon faces are fan-triangulated from vertex 0.

    Accepts the malformed single-token header "OFF<nv> <nf> <ne>" that occurs
    in ModelNet40 files.
    """
    text = source if isinstance(source, str) else source.read()
    lines = _iter_content_lines(text)

    try:
        lineno, line = next(lines)
    except StopIteration:
        raise MeshParseError("empty file", 1) from None
    if not line.startswith("OFF"):
        raise MeshParseError("missing OFF header", lineno)
    rest = line[3:].strip()
    if not rest:
        try:
            lineno, rest = next(lines)
        except StopIteration:
            raise MeshParseError("missing vertex/face counts", lineno) from None
    counts = rest.split()
    if len(counts) < 2:
        raise MeshParseError("expected vertex and face counts", lineno)
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except ValueError:
        raise MeshParseError(f"bad counts {counts[:2]}", lineno) from None
    if nv < 0 or nf < 0:
        raise MeshParseError("negative counts", lineno)

    vertices = np.empty((nv, 3), dtype=np.float64)
    for i in range(nv):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise MeshParseError(f"expected {nv} vertices, got {i}", lineno) from None
        fields = line.split()
        if len(fields) < 3:
            raise MeshParseError("vertex needs 3 coordinates", lineno)
        try:
            vertices[i] = [float(f) for f in fields[:3]]
        except ValueError:
            raise MeshParseError(f"bad vertex coordinate in {fields[:3]}", lineno) from None

    triangles: list[tuple[int, int, int]] = []
    for i in range(nf):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise MeshParseError(f"expected {nf} faces, got {i}", lineno) from None
        fields = line.split()
        try:
            k = int(fields[0])
            idx = [int(f) for f in fields[1 : 1 + k]]
        except (ValueError, IndexError):
            raise MeshParseError("bad face record", lineno) from None
        if k < 3 or len(idx) != k:
            raise MeshParseError(f"face with {k} vertices", lineno)
        for j in idx:
            if not 0 <= j < nv:
                raise MeshParseError(f"vertex index {j} out of range", lineno)
        triangles.extend(_fan_triangulate(idx))

    return TriangleMesh(vertices, np.array(triangles, dtype=np.int64).reshape(-1, 3))


def parse_obj(source: str | TextIO) -> TriangleMesh:
    """Parse Wavefront OBJ text; only v/f records are honored.

    Negative face indices resolve relative to the vertex count seen so far.
    """
    text = source if isinstance(source, str) else source.read()
    vertices: list[list[float]] = []
    triangles: list[tuple[int, int, int]] = []

    for lineno, line in _iter_content_lines(text):
        fields = line.split()
        tag = fields[0]
        if tag == "v":
            if len(fields) < 4:
                raise MeshParseError("vertex needs 3 coordinates", lineno)
            try:
                vertices.append([float(f) for f in fields[1:4]])
            except ValueError:
                raise MeshParseError(f"bad vertex coordinate in {fields[1:4]}", lineno) from None
        elif tag == "f":
            if len(fields) < 4:
                raise MeshParseError("face needs at least 3 vertices", lineno)
            idx = []
            for token in fields[1:]:
                try:
                    raw = int(token.split("/", 1)[0])
                except ValueError:
                    raise MeshParseError(f"bad face index {token!r}", lineno) from None
                if raw == 0:
                    raise MeshParseError("OBJ indices are 1-based; 0 is invalid", lineno)
                j = raw - 1 if raw > 0 else len(vertices) + raw
                if not 0 <= j < len(vertices):
                    raise MeshParseError(f"vertex index {raw} out of range", lineno)
                idx.append(j)
            triangles.extend(_fan_triangulate(idx))
        # vn, vt, usemtl, g, o, s, mtllib: ignored

    return TriangleMesh(
        np.array(vertices, dtype=np.float64).reshape(-1, 3),
        np.array(triangles, dtype=np.int64).reshape(-1, 3),
    )


def load_mesh(path) -> TriangleMesh:
    """Load a mesh from an .off or .obj file, dispatching on extension."""
    import pathlib

    p = pathlib.Path(path)
    text = p.read_text()
    suffix = p.suffix.lower()
    if suffix == ".obj":
        return parse_obj(text)
    if suffix == ".off":
        return parse_off(text)
    raise MeshError(f"unsupported mesh format {suffix!r} (expected .off or .obj)")


def serialize_off(mesh: TriangleMesh) -> str:
    """Write OFF text. float repr is used so coordinates round-trip exactly."""
    out = ["OFF", f"{mesh.num_vertices} {mesh.num_triangles} 0"]
    for v in mesh.vertices:
        out.append(" ".join(repr(float(c)) for c in v))
    for t in mesh.triangles:
        out.append(f"3 {t[0]} {t[1]} {t[2]}")
    return "\n".join(out) + "\n"
