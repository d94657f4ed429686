"""v2gen: view-grid renderings of 3D triangle meshes.

Renders a mesh into NV orthographic views of PV pixels each, with view
count and per-view resolution traded against each other at a constant
total pixel budget, and benchmarks how classification accuracy moves
along that continuum.
"""

from .bench import SweepRow, knn_classify, sweep, write_sweep_csv
from .estimators import TensorKnnClassifier, ViewGridEncoder
from .mesh import (
    Aabb,
    MeshError,
    MeshParseError,
    TriangleMesh,
    bounding_box,
    load_mesh,
    normalize,
    parse_obj,
    parse_off,
    serialize_off,
)
from .pipeline import (
    FormatError,
    V2Tensor,
    generate,
    generate_batch,
    read_v2,
    tile_montage,
    untile_montage,
    write_preview_png,
    write_v2,
)
from .raycast import Bvh, Ray, RayHit, build_bvh, cast_rays, intersect, intersect_brute
from .shapes import SHAPE_CLASSES, ShapeSpec, make_shape, make_toy_dataset
from .views import (
    ConfigError,
    SphericalDirection,
    V2Config,
    ViewFrame,
    build_view_frame,
    enumerate_continuum,
    grid_ray_origins,
    sample_view_centers,
)

__version__ = "0.1.0"

__all__ = [
    "Aabb",
    "Bvh",
    "ConfigError",
    "FormatError",
    "MeshError",
    "MeshParseError",
    "Ray",
    "RayHit",
    "SHAPE_CLASSES",
    "ShapeSpec",
    "SphericalDirection",
    "SweepRow",
    "TensorKnnClassifier",
    "TriangleMesh",
    "V2Config",
    "V2Tensor",
    "ViewFrame",
    "ViewGridEncoder",
    "bounding_box",
    "build_bvh",
    "build_view_frame",
    "cast_rays",
    "enumerate_continuum",
    "generate",
    "generate_batch",
    "grid_ray_origins",
    "intersect",
    "intersect_brute",
    "knn_classify",
    "load_mesh",
    "make_shape",
    "make_toy_dataset",
    "normalize",
    "parse_obj",
    "parse_off",
    "read_v2",
    "sample_view_centers",
    "serialize_off",
    "sweep",
    "tile_montage",
    "untile_montage",
    "write_preview_png",
    "write_sweep_csv",
    "write_v2",
]
