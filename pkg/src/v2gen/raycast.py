"""Ray/triangle intersection against a median-split BVH.

The BVH traversal kernel is numba-compiled and releases the GIL, so many
rays can be cast from worker threads against one shared structure.
`intersect_brute` is an independent all-triangles oracle used by the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .mesh import MeshError, TriangleMesh

__all__ = ["Ray", "RayHit", "Bvh", "build_bvh", "intersect", "intersect_brute", "cast_rays"]

LEAF_SIZE = 4
T_MIN = 1e-9  # self-intersection epsilon
T_TIE = 1e-12  # |dt| below this is a tie, broken by lowest triangle index
DET_EPS = 1e-14


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    direction: np.ndarray  # unit length

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=np.float64)
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ValueError("ray direction must be unit length")


@dataclass(frozen=True)
class RayHit:
    t: float
    triangle: int
    surface_normal: np.ndarray  # unit, flipped to face the ray
    cos_inc: float
    sin_inc: float


@dataclass(frozen=True)
class Bvh:
    """Flat binary BVH over the non-degenerate triangles of one mesh.

    Node i is a leaf iff left[i] < 0; leaves index a contiguous run of
    `order`, a permutation of surviving triangle indices. v0/e1/e2 are the
    precomputed triangle bases and edges in `order` order.
    """

    nodes_min: np.ndarray
    nodes_max: np.ndarray
    left: np.ndarray
    right: np.ndarray
    start: np.ndarray
    count: np.ndarray
    order: np.ndarray
    v0: np.ndarray
    e1: np.ndarray
    e2: np.ndarray


def _triangle_geometry(mesh: TriangleMesh):
    verts = mesh.vertices
    tris = mesh.triangles
    v0 = verts[tris[:, 0]]
    e1 = verts[tris[:, 1]] - v0
    e2 = verts[tris[:, 2]] - v0
    area2 = np.linalg.norm(np.cross(e1, e2), axis=1)
    return v0, e1, e2, area2


def build_bvh(mesh: TriangleMesh) -> Bvh:
    """Median split on the longest axis of centroid bounds, leaves <= 4
    triangles. Zero-area triangles are excluded."""
    if mesh.num_triangles == 0:
        raise MeshError("cannot build BVH for mesh without triangles")
    v0_all, e1_all, e2_all, area2 = _triangle_geometry(mesh)
    alive = np.flatnonzero(area2 > 0.0)
    if alive.size == 0:
        raise MeshError("mesh has no non-degenerate triangles")

    tri_min = np.minimum(np.minimum(v0_all, v0_all + e1_all), v0_all + e2_all)[alive]
    tri_max = np.maximum(np.maximum(v0_all, v0_all + e1_all), v0_all + e2_all)[alive]
    centroids = 0.5 * (tri_min + tri_max)

    nodes_min, nodes_max = [], []
    left, right, start, count = [], [], [], []
    order = np.empty(alive.size, dtype=np.int64)
    cursor = 0

    # iterative build; stack holds (local triangle index array, parent slot)
    stack: list[tuple[np.ndarray, int]] = [(np.arange(alive.size), -1)]
    while stack:
        idx, parent_slot = stack.pop()
        node = len(nodes_min)
        if parent_slot >= 0:
            right[parent_slot] = node
        nodes_min.append(tri_min[idx].min(axis=0))
        nodes_max.append(tri_max[idx].max(axis=0))
        if idx.size <= LEAF_SIZE:
            left.append(-1)
            right.append(-1)
            start.append(cursor)
            count.append(idx.size)
            order[cursor : cursor + idx.size] = alive[idx]
            cursor += idx.size
            continue
        cmin = centroids[idx].min(axis=0)
        cmax = centroids[idx].max(axis=0)
        axis = int(np.argmax(cmax - cmin))
        sorted_idx = idx[np.argsort(centroids[idx, axis], kind="stable")]
        half = idx.size // 2
        left.append(node + 1)
        right.append(-2)  # patched when the right child is emitted
        start.append(-1)
        count.append(0)
        # push right first so the left child lands at node+1
        stack.append((sorted_idx[half:], node))
        stack.append((sorted_idx[:half], -1))

    lookup = order  # permutation into the original triangle array
    return Bvh(
        nodes_min=np.asarray(nodes_min),
        nodes_max=np.asarray(nodes_max),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        start=np.asarray(start, dtype=np.int64),
        count=np.asarray(count, dtype=np.int64),
        order=lookup,
        v0=np.ascontiguousarray(v0_all[lookup]),
        e1=np.ascontiguousarray(e1_all[lookup]),
        e2=np.ascontiguousarray(e2_all[lookup]),
    )


@njit(cache=True, nogil=True, error_model="numpy")
def _cast_kernel(
    nodes_min, nodes_max, left, right, start, count, order, v0, e1, e2,
    origins, directions, out_t, out_tri, out_cos,
):  # pragma: no cover - exercised via cast_rays
    n_rays = origins.shape[0]
    stack = np.empty(128, dtype=np.int64)
    for r in range(n_rays):
        ox, oy, oz = origins[r, 0], origins[r, 1], origins[r, 2]
        dx, dy, dz = directions[r, 0], directions[r, 1], directions[r, 2]
        best_t = np.inf
        best_tri = -1
        best_cos = 0.0
        top = 0
        stack[top] = 0
        top += 1
        while top > 0:
            top -= 1
            node = stack[top]
            # slab test; zero direction components constrain the origin only
            tmin = 0.0
            tmax = np.inf
            miss = False
            if dx != 0.0:
                inv = 1.0 / dx
                t1 = (nodes_min[node, 0] - ox) * inv
                t2 = (nodes_max[node, 0] - ox) * inv
                tmin = max(tmin, min(t1, t2))
                tmax = min(tmax, max(t1, t2))
            elif ox < nodes_min[node, 0] or ox > nodes_max[node, 0]:
                miss = True
            if dy != 0.0:
                inv = 1.0 / dy
                t1 = (nodes_min[node, 1] - oy) * inv
                t2 = (nodes_max[node, 1] - oy) * inv
                tmin = max(tmin, min(t1, t2))
                tmax = min(tmax, max(t1, t2))
            elif oy < nodes_min[node, 1] or oy > nodes_max[node, 1]:
                miss = True
            if dz != 0.0:
                inv = 1.0 / dz
                t1 = (nodes_min[node, 2] - oz) * inv
                t2 = (nodes_max[node, 2] - oz) * inv
                tmin = max(tmin, min(t1, t2))
                tmax = min(tmax, max(t1, t2))
            elif oz < nodes_min[node, 2] or oz > nodes_max[node, 2]:
                miss = True
            if miss or tmax < tmin or tmin > best_t + T_TIE:
                continue
            if left[node] < 0:
                s = start[node]
                for k in range(s, s + count[node]):
                    # Moller-Trumbore
                    px = dy * e2[k, 2] - dz * e2[k, 1]
                    py = dz * e2[k, 0] - dx * e2[k, 2]
                    pz = dx * e2[k, 1] - dy * e2[k, 0]
                    det = e1[k, 0] * px + e1[k, 1] * py + e1[k, 2] * pz
                    if -DET_EPS < det < DET_EPS:
                        continue
                    inv_det = 1.0 / det
                    tx = ox - v0[k, 0]
                    ty = oy - v0[k, 1]
                    tz = oz - v0[k, 2]
                    u = (tx * px + ty * py + tz * pz) * inv_det
                    if u < 0.0 or u > 1.0:
                        continue
                    qx = ty * e1[k, 2] - tz * e1[k, 1]
                    qy = tz * e1[k, 0] - tx * e1[k, 2]
                    qz = tx * e1[k, 1] - ty * e1[k, 0]
                    v = (dx * qx + dy * qy + dz * qz) * inv_det
                    if v < 0.0 or u + v > 1.0:
                        continue
                    t = (e2[k, 0] * qx + e2[k, 1] * qy + e2[k, 2] * qz) * inv_det
                    if t < T_MIN:
                        continue
                    tri = order[k]
                    if t < best_t - T_TIE or (t <= best_t + T_TIE and tri < best_tri):
                        if t < best_t:
                            best_t = t
                        best_tri = tri
                        # geometric normal = e1 x e2
                        nx = e1[k, 1] * e2[k, 2] - e1[k, 2] * e2[k, 1]
                        ny = e1[k, 2] * e2[k, 0] - e1[k, 0] * e2[k, 2]
                        nz = e1[k, 0] * e2[k, 1] - e1[k, 1] * e2[k, 0]
                        nn = (nx * nx + ny * ny + nz * nz) ** 0.5
                        c = abs(dx * nx + dy * ny + dz * nz) / nn
                        best_cos = min(c, 1.0)
            else:
                stack[top] = left[node]
                top += 1
                stack[top] = right[node]
                top += 1
        out_t[r] = best_t
        out_tri[r] = best_tri
        out_cos[r] = best_cos


def cast_rays(bvh: Bvh, origins: np.ndarray, directions: np.ndarray):
    """Batch nearest-hit query.

    origins/directions: (N, 3). Returns (t, triangle, cos_inc) arrays;
    misses carry t = inf and triangle = -1.
    """
    origins = np.ascontiguousarray(origins.reshape(-1, 3), dtype=np.float64)
    directions = np.ascontiguousarray(
        np.broadcast_to(directions, origins.shape), dtype=np.float64
    )
    n = origins.shape[0]
    out_t = np.empty(n, dtype=np.float64)
    out_tri = np.empty(n, dtype=np.int64)
    out_cos = np.empty(n, dtype=np.float64)
    _cast_kernel(
        bvh.nodes_min, bvh.nodes_max, bvh.left, bvh.right, bvh.start, bvh.count,
        bvh.order, bvh.v0, bvh.e1, bvh.e2,
        origins, directions, out_t, out_tri, out_cos,
    )
    return out_t, out_tri, out_cos


def _make_hit(mesh: TriangleMesh, t: float, tri: int, direction: np.ndarray) -> RayHit:
    a, b, c = mesh.vertices[mesh.triangles[tri]]
    normal = np.cross(b - a, c - a)
    normal /= np.linalg.norm(normal)
    cos_inc = min(abs(float(np.dot(direction, normal))), 1.0)
    if np.dot(direction, normal) > 0.0:
        normal = -normal
    return RayHit(
        t=float(t),
        triangle=int(tri),
        surface_normal=normal,
        cos_inc=cos_inc,
        sin_inc=float(np.sqrt(max(0.0, 1.0 - cos_inc * cos_inc))),
    )


def intersect(bvh: Bvh, mesh: TriangleMesh, ray: Ray) -> RayHit | None:
    """Nearest hit via the BVH; result contract identical to intersect_brute."""
    direction = np.asarray(ray.direction, dtype=np.float64)
    t, tri, _ = cast_rays(bvh, np.asarray(ray.origin, dtype=np.float64), direction)
    if tri[0] < 0:
        return None
    return _make_hit(mesh, t[0], tri[0], direction)


def intersect_brute(mesh: TriangleMesh, ray: Ray) -> RayHit | None:
    """All-triangles oracle: vectorized determinant-method intersection,
    nearest t >= 1e-9, ties broken by lowest triangle index."""
    if mesh.num_triangles == 0:
        return None
    origin = np.asarray(ray.origin, dtype=np.float64)
    direction = np.asarray(ray.direction, dtype=np.float64)
    v0, e1, e2, area2 = _triangle_geometry(mesh)

    pvec = np.cross(direction, e2)
    det = np.einsum("ij,ij->i", e1, pvec)
    ok = (np.abs(det) > DET_EPS) & (area2 > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_det = np.where(ok, 1.0 / det, 0.0)
        tvec = origin - v0
        u = np.einsum("ij,ij->i", tvec, pvec) * inv_det
        qvec = np.cross(tvec, e1)
        v = (qvec @ direction) * inv_det
        t = np.einsum("ij,ij->i", e2, qvec) * inv_det
    ok &= (u >= 0.0) & (u <= 1.0) & (v >= 0.0) & (u + v <= 1.0) & (t >= T_MIN)
    if not ok.any():
        return None
    t = np.where(ok, t, np.inf)
    best = int(np.argmin(t))  # argmin takes the first (lowest index) minimum
    tied = np.flatnonzero(np.abs(t - t[best]) <= T_TIE)
    best = int(tied.min())
    return _make_hit(mesh, t[best], best, direction)
