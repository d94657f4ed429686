"""Tensor assembly, the view montage, and the .v2 binary container.

A generated tensor holds NV*y*x*NC float32 values in (view, row, col,
channel) order. Background pixels (ray misses) store depth 1.0 and zero
incidence so the depth channel stays inside [0, 1].
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import BinaryIO, Sequence

import numpy as np

from .mesh import TriangleMesh, is_normalized
from .raycast import Bvh, cast_rays
from .views import V2Config, view_rays

__all__ = [
    "CHANNELS",
    "V2Tensor",
    "FormatError",
    "generate",
    "tile_montage",
    "untile_montage",
    "write_v2",
    "read_v2",
    "write_preview_png",
]

# canonical channel order; user-supplied channel lists are reordered to this
CHANNELS = ("depth", "cos_inc", "sin_inc")

BACKGROUND_DEPTH = 1.0
MAGIC = b"V2R1"
VERSION = 1


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class V2Tensor:
    config: V2Config
    channel_names: tuple[str, ...]
    values: np.ndarray  # (NV, y, x, NC) float32
    source_id: str = ""

    def __post_init__(self):
        expected = (self.config.nv, self.config.y, self.config.x, self.config.nc)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != {expected}")
        if len(self.channel_names) != self.config.nc:
            raise ValueError("channel count does not match config.nc")


def canonical_channels(channels: Sequence[str]) -> tuple[str, ...]:
    names = list(dict.fromkeys(channels))
    unknown = [c for c in names if c not in CHANNELS]
    if unknown:
        raise ValueError(f"unknown channels {unknown}; available: {list(CHANNELS)}")
    if not names:
        raise ValueError("channel list is empty")
    return tuple(c for c in CHANNELS if c in names)


def generate(
    mesh: TriangleMesh,
    bvh: Bvh,
    config: V2Config,
    channels: Sequence[str] = ("depth",),
    source_id: str = "",
    jobs: int = 1,
) -> V2Tensor:
    """Cast the full ray grid of every view and fill the channel values.

    The mesh must be normalized (longest bounding-box side 0.4, centered).
    Views are computed independently, so `jobs` worker threads only change
    wall time, never the output.
    """
    names = canonical_channels(channels)
    if config.nc != len(names):
        raise ValueError(f"config.nc={config.nc} but {len(names)} channels requested")
    if not is_normalized(mesh):
        raise ValueError("mesh is not normalized; call mesh.normalize() first")

    pv = config.pv
    origins, normals = view_rays(config)
    origins = np.ascontiguousarray(origins.reshape(-1, 3))
    directions = np.repeat(normals, pv, axis=0)

    n_rays = origins.shape[0]
    t = np.empty(n_rays)
    tri = np.empty(n_rays, dtype=np.int64)
    cos_inc = np.empty(n_rays)

    def fill_slice(lo: int, hi: int) -> None:
        t[lo:hi], tri[lo:hi], cos_inc[lo:hi] = cast_rays(
            bvh, origins[lo:hi], directions[lo:hi]
        )

    if jobs > 1 and n_rays > 1:
        # disjoint contiguous slices; the kernel releases the GIL
        bounds = np.linspace(0, n_rays, min(jobs, n_rays) + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(lambda k: fill_slice(bounds[k], bounds[k + 1]),
                          range(len(bounds) - 1)))
    else:
        fill_slice(0, n_rays)

    hit = tri >= 0
    planes = []
    if "depth" in names:
        planes.append(np.where(hit, t, BACKGROUND_DEPTH))
    if "cos_inc" in names:
        planes.append(np.where(hit, cos_inc, 0.0))
    if "sin_inc" in names:
        sin_inc = np.sqrt(np.maximum(0.0, 1.0 - cos_inc**2))
        planes.append(np.where(hit, sin_inc, 0.0))
    values = np.stack(planes, axis=-1).astype(np.float32).reshape(
        config.nv, config.y, config.x, config.nc
    )
    return V2Tensor(config=config, channel_names=names, values=values, source_id=source_id)


def generate_batch(
    items: Sequence[tuple[TriangleMesh, Bvh, str]],
    config: V2Config,
    channels: Sequence[str] = ("depth",),
    jobs: int = 1,
) -> list[V2Tensor]:
    """Generate one tensor per (mesh, bvh, source_id) item; `jobs` threads
    run across items. The ray kernels release the GIL, so this scales with
    cores while keeping each output byte-identical to a serial run."""

    def one(item):
        mesh, bvh, source_id = item
        return generate(mesh, bvh, config, channels, source_id=source_id)

    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, items))
    return [one(item) for item in items]


def tile_montage(tensor: V2Tensor) -> np.ndarray:
    """(m*y, n*x, NC) image: the view at latitude row a, longitude column b
    occupies the pixel block [a*y, (a+1)*y) x [b*x, (b+1)*x)."""
    cfg = tensor.config
    grid = tensor.values.reshape(cfg.m, cfg.n, cfg.y, cfg.x, cfg.nc)
    return np.ascontiguousarray(grid.transpose(0, 2, 1, 3, 4).reshape(
        cfg.m * cfg.y, cfg.n * cfg.x, cfg.nc
    ))


def untile_montage(montage: np.ndarray, config: V2Config,
                   channel_names: Sequence[str], source_id: str = "") -> V2Tensor:
    """Inverse of tile_montage."""
    grid = montage.reshape(config.m, config.y, config.n, config.x, config.nc)
    values = np.ascontiguousarray(
        grid.transpose(0, 2, 1, 3, 4).reshape(config.nv, config.y, config.x, config.nc)
    ).astype(np.float32)
    return V2Tensor(config=config, channel_names=tuple(channel_names),
                    values=values, source_id=source_id)


def write_v2(tensor: V2Tensor, sink: BinaryIO) -> int:
    """Serialize to the .v2 container (little-endian). Returns bytes written."""
    cfg = tensor.config
    names = ",".join(tensor.channel_names).encode()
    source = tensor.source_id.encode()
    header = struct.pack("<4sI5I", MAGIC, VERSION, cfg.m, cfg.n, cfg.x, cfg.y, cfg.nc)
    header += struct.pack("<I", len(names)) + names
    header += struct.pack("<I", len(source)) + source
    payload = np.ascontiguousarray(tensor.values, dtype="<f4").tobytes()
    sink.write(header)
    sink.write(payload)
    return len(header) + len(payload)


def _read_exact(source: BinaryIO, n: int) -> bytes:
    data = source.read(n)
    if len(data) != n:
        raise FormatError(f"truncated stream: wanted {n} bytes, got {len(data)}")
    return data


def read_v2(source: BinaryIO) -> V2Tensor:
    magic, version, m, n, x, y, nc = struct.unpack("<4sI5I", _read_exact(source, 28))
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    (names_len,) = struct.unpack("<I", _read_exact(source, 4))
    names = tuple(_read_exact(source, names_len).decode().split(","))
    (src_len,) = struct.unpack("<I", _read_exact(source, 4))
    source_id = _read_exact(source, src_len).decode()
    config = V2Config(m=m, n=n, x=x, y=y, nc=nc)
    raw = _read_exact(source, config.c * 4)
    extra = source.read(1)
    if extra:
        raise FormatError("trailing bytes after payload")
    values = np.frombuffer(raw, dtype="<f4").reshape(config.nv, y, x, nc)
    return V2Tensor(config=config, channel_names=names, values=values, source_id=source_id)


def write_preview_png(tensor: V2Tensor, path) -> None:
    """8-bit grayscale montage of the depth channel; nearer is brighter."""
    from PIL import Image

    if "depth" not in tensor.channel_names:
        raise ValueError("preview requires a depth channel")
    k = tensor.channel_names.index("depth")
    depth = tile_montage(tensor)[:, :, k]
    pixels = np.round(255.0 * (1.0 - depth)).clip(0, 255).astype(np.uint8)
    Image.fromarray(pixels, mode="L").save(path, format="PNG")
