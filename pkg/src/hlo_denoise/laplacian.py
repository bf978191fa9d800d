"""Full-window Laplacians and the explicit diffusion-flow stepper.

Laplacians here point from the neighborhood average toward the vertex
(``delta = v - avg``), so a smoothing step *subtracts* them.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse

from .errors import IsolatedVertex, LengthMismatch

#: Cotangent weights are clipped to this range before normalization.
COT_WEIGHT_CLAMP = (0.0, 1e4)


class LaplacianKind(str, Enum):
    UNIFORM = "uniform"
    COTANGENT = "cotangent"
    HALF_KERNEL = "half_kernel"


@dataclass(frozen=True)
class LaplacianField:
    vectors: np.ndarray
    kind: LaplacianKind

    def norms(self):
        return np.linalg.norm(self.vectors, axis=1)


@dataclass(frozen=True)
class FlowConfig:
    step: float = 1.0
    iterations: int = 1
    fix_boundaries: bool = True

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations}")


def _require_connected(mesh):
    deg = mesh.degrees
    if (deg == 0).any():
        raise IsolatedVertex(f"vertex {int(np.argmax(deg == 0))} has no neighbors")
    return deg


def neighbor_centroids(mesh, positions=None):
    p = mesh.positions if positions is None else positions
    deg = _require_connected(mesh)
    sums = np.add.reduceat(p[mesh.neighbor_indices], mesh.neighbor_offsets[:-1], axis=0)
    return sums / deg[:, None]


def uniform_laplacian(mesh, positions=None):
    """``delta_i = v_i - mean(one-ring of v_i)`` for every vertex."""
    p = mesh.positions if positions is None else positions
    return LaplacianField(p - neighbor_centroids(mesh, p), LaplacianKind.UNIFORM)


def cotangent_weights(mesh, positions=None, clamp=COT_WEIGHT_CLAMP):
    """Symmetric sparse matrix of ``w_ij = (cot a_ij + cot b_ij) / 2``.

    Boundary edges keep their single opposite angle. ``clamp=None`` disables
    clipping.
    """
    p = mesh.positions if positions is None else positions
    f = mesh.faces
    rows, cols, vals = [], [], []
    for k in range(3):
        i, j, o = f[:, (k + 1) % 3], f[:, (k + 2) % 3], f[:, k]
        u, v = p[i] - p[o], p[j] - p[o]
        cr = np.linalg.norm(np.cross(u, v), axis=1)
        dot = np.einsum("ij,ij->i", u, v)
        with np.errstate(divide="ignore", invalid="ignore"):
            cot = np.where(cr > 0, dot / cr, np.copysign(np.inf, dot))
        rows += [i, j]
        cols += [j, i]
        vals += [0.5 * cot, 0.5 * cot]
    n = mesh.n_vertices
    w = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()
    w.sum_duplicates()
    w.data = np.nan_to_num(w.data, nan=0.0, posinf=np.finfo(float).max, neginf=-np.finfo(float).max)
    if clamp is not None:
        np.clip(w.data, clamp[0], clamp[1], out=w.data)
    return w


def cotangent_laplacian(mesh, positions=None):
    """Normalized cotangent Laplacian ``sum_k w_ik (v_i - v_k) / sum_k w_ik``.

    A vertex whose clamped weights all vanish falls back to uniform weights.
    """
    p = mesh.positions if positions is None else positions
    _require_connected(mesh)
    w = cotangent_weights(mesh, p)
    wsum = np.asarray(w.sum(axis=1)).ravel()
    with np.errstate(invalid="ignore", divide="ignore"):
        avg = (w @ p) / wsum[:, None]
    bad = ~(wsum > 0)
    if bad.any():
        avg[bad] = neighbor_centroids(mesh, p)[bad]
    return LaplacianField(p - avg, LaplacianKind.COTANGENT)


def flow_step(positions, field, cfg, fixed=None):
    """One explicit Euler step ``v <- v - step * delta``; fixed rows are copied.

    Always returns a fresh array.
    """
    delta = field.vectors if isinstance(field, LaplacianField) else np.asarray(field)
    if delta.shape != positions.shape:
        raise LengthMismatch(f"field shape {delta.shape} vs positions {positions.shape}")
    out = positions - cfg.step * delta
    if fixed is not None and cfg.fix_boundaries:
        out[fixed] = positions[fixed]
    return out


_OPERATORS = {
    LaplacianKind.UNIFORM: uniform_laplacian,
    LaplacianKind.COTANGENT: cotangent_laplacian,
}


def smooth(mesh, kind, cfg, on_iteration=None):
    """Run ``cfg.iterations`` Jacobi sweeps of the uniform or cotangent flow.

    ``on_iteration(t, positions)`` is called after every sweep (t starts at 1).
    Returns the smoothed mesh.
    """
    op = _OPERATORS[LaplacianKind(kind)]
    fixed = mesh.boundary_vertex if cfg.fix_boundaries else None
    p = mesh.positions.copy()
    for t in range(1, cfg.iterations + 1):
        p = flow_step(p, op(mesh, p), cfg, fixed)
        if on_iteration is not None:
            on_iteration(t, p)
    return mesh.with_positions(p)

