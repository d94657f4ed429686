"""scikit-learn style estimators so the toolkit composes with pipelines.

`ViewGridEncoder` turns a list of triangle meshes into a flat feature
matrix of ray-cast channel values; `TensorKnnClassifier` is the matching
nearest-neighbor classifier with deterministic tie-breaks.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import bench
from .mesh import TriangleMesh, is_normalized, normalize
from .pipeline import generate
from .raycast import build_bvh
from .views import V2Config

__all__ = ["ViewGridEncoder", "TensorKnnClassifier", "check_meshes"]


def check_meshes(X) -> list[TriangleMesh]:
    """Validate transformer input: a sequence of TriangleMesh objects."""
    if isinstance(X, TriangleMesh):
        raise TypeError("expected a sequence of meshes, got a single TriangleMesh")
    meshes = list(X)
    for i, mesh in enumerate(meshes):
        if not isinstance(mesh, TriangleMesh):
            raise TypeError(f"X[{i}] is {type(mesh).__name__}, expected TriangleMesh")
    return meshes


class ViewGridEncoder(TransformerMixin, BaseEstimator):
    """Encode meshes as flattened view-grid tensors.

    Parameters
    ----------
    config : str
        Configuration string "MxNxXxY", e.g. "1x4x50x50".
    channels : sequence of str
        Subset of {"depth", "cos_inc", "sin_inc"}.
    normalize_input : bool
        Normalize meshes before encoding; if False, inputs must already be
        normalized.
    n_jobs : int
        Worker threads per tensor.
    """

    def __init__(self, config="1x4x50x50", channels=("depth",),
                 normalize_input=True, n_jobs=1):
        self.config = config
        self.channels = channels
        self.normalize_input = normalize_input
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        cfg = V2Config.from_string(self.config)
        names = tuple(self.channels)
        self.config_ = V2Config(m=cfg.m, n=cfg.n, x=cfg.x, y=cfg.y, nc=len(names))
        self.channel_names_ = names
        return self

    def transform(self, X):
        if not hasattr(self, "config_"):
            raise NotFittedError("ViewGridEncoder is not fitted; call fit first")
        meshes = check_meshes(X)
        rows = []
        for mesh in meshes:
            if self.normalize_input:
                mesh = normalize(mesh)
            elif not is_normalized(mesh):
                raise ValueError("mesh is not normalized and normalize_input=False")
            tensor = generate(
                mesh, build_bvh(mesh), self.config_, self.channel_names_,
                jobs=self.n_jobs,
            )
            rows.append(tensor.values.ravel())
        return np.stack(rows) if rows else np.empty((0, self.config_.c), np.float32)


class TensorKnnClassifier(ClassifierMixin, BaseEstimator):
    """Euclidean kNN with deterministic tie-breaks: distance ties favor the
    lower training index, vote ties the nearest tied label."""

    def __init__(self, n_neighbors=3):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError(f"X must be 2D, got shape {X.shape}")
        y = list(y)
        if len(y) != len(X):
            raise ValueError("X and y length mismatch")
        if not 1 <= self.n_neighbors <= len(X):
            raise ValueError(f"n_neighbors={self.n_neighbors} outside [1, {len(X)}]")
        self.train_ = [(row, label) for row, label in zip(X, y)]
        self.classes_ = np.unique(np.asarray(y, dtype=object))
        return self

    def predict(self, X):
        if not hasattr(self, "train_"):
            raise NotFittedError("TensorKnnClassifier is not fitted; call fit first")
        X = np.asarray(X, dtype=np.float64)
        return np.asarray(
            [bench.knn_classify(self.train_, row, self.n_neighbors) for row in X],
            dtype=object,
        )
