"""Accuracy-vs-configuration sweep: leave-one-out kNN over flattened
tensors at every point of the configuration continuum."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .mesh import TriangleMesh
from .pipeline import generate
from .raycast import build_bvh
from .views import V2Config, enumerate_continuum

__all__ = ["SweepRow", "knn_classify", "sweep", "write_sweep_csv"]

CSV_HEADER = ("config", "f", "NV", "PV", "C", "accuracy")


@dataclass(frozen=True)
class SweepRow:
    config: V2Config
    f: int  # view-subdivision factor relative to the sweep base
    nv: int
    pv: int
    c: int
    accuracy: float


def _vote(labels: Sequence, order: np.ndarray, k: int):
    """Majority among the k nearest (`order` is ascending by (distance, index));
    vote ties go to the nearest member of the tied label set."""
    top = order[:k]
    counts: dict = {}
    for i in top:
        lab = labels[i]
        counts[lab] = counts.get(lab, 0) + 1
    best = max(counts.values())
    tied = {lab for lab, c in counts.items() if c == best}
    for i in top:
        if labels[i] in tied:
            return labels[i]
    raise AssertionError("unreachable")


def knn_classify(train: Sequence[tuple[np.ndarray, object]], query: np.ndarray, k: int):
    """k nearest by Euclidean distance; distance ties favor the lower
    training index, vote ties the nearest tied label."""
    if k < 1 or k > len(train):
        raise ValueError(f"k={k} outside [1, {len(train)}]")
    vecs = [np.asarray(v, dtype=np.float64).ravel() for v, _ in train]
    q = np.asarray(query, dtype=np.float64).ravel()
    dims = {v.shape[0] for v in vecs} | {q.shape[0]}
    if len(dims) != 1:
        raise ValueError(f"inconsistent vector dimensions: {sorted(dims)}")
    X = np.stack(vecs)
    dist = np.linalg.norm(X - q, axis=1)
    order = np.lexsort((np.arange(len(dist)), dist))
    return _vote([lab for _, lab in train], order, k)


def leave_one_out_accuracy(X: np.ndarray, labels: Sequence, k: int) -> float:
    """LOO accuracy with the knn_classify tie-break rules, computed from a
    single pairwise distance matrix."""
    n = len(labels)
    sq = np.einsum("ij,ij->i", X, X)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    correct = 0
    for i in range(n):
        rest = np.concatenate([np.arange(i), np.arange(i + 1, n)])
        d = d2[i, rest]
        order = np.lexsort((np.arange(len(rest)), d))
        pred = _vote([labels[j] for j in rest], order, k)
        if pred == labels[i]:
            correct += 1
    return correct / n


def sweep(
    dataset: Sequence[tuple[TriangleMesh, object]],
    base: V2Config,
    channels: Sequence[str] = ("depth",),
    k: int = 3,
    jobs: int = 1,
) -> list[SweepRow]:
    """One row per continuum configuration, ordered by view count ascending."""
    labels = [lab for _, lab in dataset]
    for lab in set(labels):
        if labels.count(lab) < 2:
            raise ValueError(f"need >= 2 samples per class, class {lab!r} has fewer")
    bvhs = [build_bvh(mesh) for mesh, _ in dataset]

    rows = []
    for cfg in enumerate_continuum(base):
        X = np.stack(
            [
                generate(mesh, bvh, cfg, channels, jobs=jobs).values.ravel()
                for (mesh, _), bvh in zip(dataset, bvhs)
            ]
        ).astype(np.float64)
        acc = leave_one_out_accuracy(X, labels, k)
        rows.append(
            SweepRow(
                config=cfg,
                f=cfg.m // base.m,
                nv=cfg.nv,
                pv=cfg.pv,
                c=cfg.c,
                accuracy=acc,
            )
        )
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], sink: TextIO) -> None:
    writer = csv.writer(sink)
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(
            [row.config.to_string(), row.f, row.nv, row.pv, row.c, f"{row.accuracy:.6f}"]
        )
