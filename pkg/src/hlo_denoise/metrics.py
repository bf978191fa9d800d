"""Noise synthesis and mesh quality metrics."""
from __future__ import annotations

import io
import csv
import math
from dataclasses import astuple, dataclass, fields
from enum import Enum

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyMesh, FaceCountMismatch, OpenMesh, VertexCountMismatch
from .laplacian import cotangent_laplacian
from .mesh import face_areas, face_cross, mean_edge_length, vertex_normals


class NoiseDirection(str, Enum):
    ISOTROPIC = "isotropic"
    ALONG_NORMAL = "along_normal"


@dataclass(frozen=True)
class NoiseSpec:
    sigma_factor: float
    seed: int = 0
    direction: NoiseDirection = NoiseDirection.ISOTROPIC

    def __post_init__(self):
        if not self.sigma_factor >= 0:
            raise ValueError(f"sigma_factor must be >= 0, got {self.sigma_factor}")
        object.__setattr__(self, "direction", NoiseDirection(self.direction))


def noise_sigma(mesh, spec):
    """Absolute standard deviation ``sigma_factor * mean_edge_length``."""
    return spec.sigma_factor * mean_edge_length(mesh)


def add_noise(mesh, spec):
    """Add zero-mean Gaussian noise scaled by the mean edge length.

    Draws come from a Philox counter-based stream keyed by ``spec.seed`` and
    are consumed in vertex-index order, so vertex ``i`` always receives the
    same sample for a given seed and vertex count.
    """
    if spec.sigma_factor == 0:
        return mesh.with_positions(mesh.positions.copy())
    sigma = noise_sigma(mesh, spec)
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    if spec.direction is NoiseDirection.ISOTROPIC:
        offset = sigma * rng.standard_normal((mesh.n_vertices, 3))
    else:
        offset = sigma * rng.standard_normal(mesh.n_vertices)[:, None] * vertex_normals(mesh)
    return mesh.with_positions(mesh.positions + offset)


# ---------------------------------------------------------------- distances


def _segment_dist2(p, a, b):
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    t = np.einsum("ij,ij->i", p - a, ab) / np.where(denom > 0, denom, 1.0)
    t = np.clip(t, 0.0, 1.0)
    d = p - (a + t[:, None] * ab)
    return np.einsum("ij,ij->i", d, d)


def point_triangle_distance(p, a, b, c):
    """Exact Euclidean distance from points ``p`` to triangles ``(a, b, c)`` (row-wise)."""
    p, a, b, c = (np.atleast_2d(np.asarray(x, dtype=np.float64)) for x in (p, a, b, c))
    p, a, b, c = np.broadcast_arrays(p, a, b, c)
    n = np.cross(b - a, c - a)
    nn = np.einsum("ij,ij->i", n, n)
    ok = nn > 0
    safe = np.where(ok, nn, 1.0)
    h = np.einsum("ij,ij->i", p - a, n) / safe
    q = p - h[:, None] * n  # projection onto the supporting plane
    # barycentric signs via sub-triangle orientation
    w0 = np.einsum("ij,ij->i", np.cross(c - b, q - b), n)
    w1 = np.einsum("ij,ij->i", np.cross(a - c, q - c), n)
    w2 = np.einsum("ij,ij->i", np.cross(b - a, q - a), n)
    inside = ok & (w0 >= 0) & (w1 >= 0) & (w2 >= 0)
    d2 = np.minimum(np.minimum(_segment_dist2(p, a, b), _segment_dist2(p, b, c)),
                    _segment_dist2(p, c, a))
    # edge distances bound the plane distance from above, so the min is exact
    # and keeps points lying on the triangle at exactly zero
    d2 = np.where(inside, np.minimum(h * h * nn, d2), d2)
    return np.sqrt(d2)


def closest_distances(points, reference, brute_force_limit=2_000_000):
    """Distance from every point to the closest triangle of ``reference``.

    Small problems are brute forced; larger ones prune candidate triangles
    with a centroid k-d tree. Both are exact.
    """
    points = np.asarray(points, dtype=np.float64)
    tri = reference.positions[reference.faces]  # (F, 3, 3)
    nf = tri.shape[0]
    if nf == 0:
        raise EmptyMesh("reference mesh has no faces")
    if points.shape[0] * nf <= brute_force_limit:
        out = np.empty(points.shape[0])
        chunk = max(1, brute_force_limit // (4 * nf))
        for s in range(0, points.shape[0], chunk):
            P = points[s:s + chunk]
            m = P.shape[0]
            d = point_triangle_distance(
                np.repeat(P, nf, axis=0), np.tile(tri[:, 0], (m, 1)),
                np.tile(tri[:, 1], (m, 1)), np.tile(tri[:, 2], (m, 1)),
            )
            out[s:s + m] = d.reshape(m, nf).min(axis=1)
        return out

    centroids = tri.mean(axis=1)
    radius = np.linalg.norm(tri - centroids[:, None, :], axis=2).max()
    tree = cKDTree(centroids)
    k = min(8, nf)
    _, near = tree.query(points, k=k)
    near = near.reshape(points.shape[0], k)
    rep = np.repeat(points, k, axis=0)
    t = tri[near.ravel()]
    upper = point_triangle_distance(rep, t[:, 0], t[:, 1], t[:, 2]).reshape(-1, k).min(axis=1)
    # any closer triangle must have its centroid within upper + radius
    balls = tree.query_ball_point(points, upper + radius)
    counts = np.fromiter((len(b) for b in balls), dtype=np.int64, count=len(balls))
    qi = np.repeat(np.arange(points.shape[0]), counts)
    fi = np.fromiter((f for b in balls for f in b), dtype=np.int64, count=int(counts.sum()))
    t = tri[fi]
    d = point_triangle_distance(points[qi], t[:, 0], t[:, 1], t[:, 2])
    out = upper.copy()
    np.minimum.at(out, qi, d)
    return out


# ------------------------------------------------------------------ metrics


def e_v(denoised, reference):
    """Area-weighted L2 vertex-to-surface error.

    ``sqrt(sum_i A(i) * dist(x_i, reference)^2 / (3 * sum_k A_k))`` where
    ``A(i)`` sums the areas of the denoised faces incident to vertex ``i`` and
    ``A_k`` runs over all denoised faces.
    """
    if denoised.n_faces == 0 or reference.n_faces == 0:
        raise EmptyMesh("E_v needs two meshes with faces")
    areas = face_areas(denoised)
    total = areas.sum()
    if total == 0:
        raise EmptyMesh("denoised mesh has zero area")
    weight = np.zeros(denoised.n_vertices)
    for k in range(3):
        np.add.at(weight, denoised.faces[:, k], areas)
    d = closest_distances(denoised.positions, reference)
    return float(np.sqrt(np.dot(weight, d * d) / (3.0 * total)))


def _angles(n1, n2):
    cr = np.linalg.norm(np.cross(n1, n2), axis=1)
    dot = np.einsum("ij,ij->i", n1, n2)
    return np.arctan2(cr, dot)


def msae_detail(denoised, reference):
    """``(msae, n_degenerate)``; degenerate faces contribute zero angle."""
    if denoised.n_faces != reference.n_faces:
        raise FaceCountMismatch(
            f"{denoised.n_faces} faces vs {reference.n_faces} in the reference"
        )
    c1 = face_cross(denoised.positions, denoised.faces)
    c2 = face_cross(reference.positions, reference.faces)
    theta = _angles(c1, c2)
    degenerate = (np.linalg.norm(c1, axis=1) == 0) | (np.linalg.norm(c2, axis=1) == 0)
    theta[degenerate] = 0.0
    return float(np.mean(theta ** 2)), int(degenerate.sum())


def msae(denoised, reference):
    """Mean squared angle (radians^2) between corresponding face normals."""
    return msae_detail(denoised, reference)[0]


def _unit(v):
    n = np.linalg.norm(v, axis=1, keepdims=True)
    return np.divide(v, n, out=np.zeros_like(v), where=n > 0)


def flipped_faces(mesh, reference=None):
    """Indices of flipped faces.

    With ``reference`` a face is flipped when its normal opposes the
    corresponding reference normal. Without one, when it opposes the summed
    unit normals of the faces sharing an edge with it.
    """
    cr = face_cross(mesh.positions, mesh.faces)
    if reference is not None:
        if reference.n_faces != mesh.n_faces:
            raise FaceCountMismatch(
                f"{mesh.n_faces} faces vs {reference.n_faces} in the reference"
            )
        ref = face_cross(reference.positions, reference.faces)
        return np.flatnonzero(np.einsum("ij,ij->i", cr, ref) < 0)

    nrm = _unit(cr)
    f = mesh.faces
    e = np.sort(np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
    _, inv = np.unique(e, axis=0, return_inverse=True)
    inv = inv.ravel()
    owner = np.tile(np.arange(mesh.n_faces), 3)
    edge_sum = np.zeros((inv.max() + 1, 3))
    np.add.at(edge_sum, inv, nrm[owner])
    around = np.zeros_like(nrm)
    np.add.at(around, owner, edge_sum[inv] - nrm[owner])
    return np.flatnonzero(np.einsum("ij,ij->i", nrm, around) < 0)


def avg_vertex_error(denoised, ground_truth):
    """``(mean |v - v_gt|, signed field (v - v_gt) . n_gt)`` over corresponding vertices."""
    if denoised.n_vertices != ground_truth.n_vertices:
        raise VertexCountMismatch(
            f"{denoised.n_vertices} vs {ground_truth.n_vertices} vertices"
        )
    diff = denoised.positions - ground_truth.positions
    signed = np.einsum("ij,ij->i", diff, vertex_normals(ground_truth))
    return float(np.linalg.norm(diff, axis=1).mean()), signed


def mean_curvature_energy(mesh, positions=None):
    """Sum of normalized cotangent Laplacian magnitudes over interior vertices.

    Boundary vertices are skipped: their one-sided Laplacian measures the
    boundary curve, not the surface.
    """
    norms = cotangent_laplacian(mesh, positions).norms()
    return float(norms[~mesh.boundary_vertex].sum())


def enclosed_volume(mesh, positions=None):
    """Signed volume by the divergence theorem; positive for outward winding."""
    if not mesh.is_closed:
        raise OpenMesh("enclosed volume needs a closed mesh")
    p = mesh.positions if positions is None else positions
    p0 = p[mesh.faces[:, 0]]
    return float(np.einsum("ij,ij->", p0, face_cross(p, mesh.faces)) / 6.0)


# ------------------------------------------------------------------- report


@dataclass(frozen=True)
class QualityReport:
    e_v: float
    msae: float
    avg_vertex_error: float
    mean_curvature_energy: float
    flipped_faces: int
    enclosed_volume: float
    runtime_seconds: float = 0.0

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def to_csv(self, header=True):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(self.columns())
        w.writerow([repr(float(x)) if isinstance(x, float) else x for x in astuple(self)])
        return buf.getvalue()

    def __str__(self):
        width = max(map(len, self.columns()))
        return "\n".join(
            f"{name:<{width}}  {value:.6g}" if isinstance(value, float) else f"{name:<{width}}  {value}"
            for name, value in zip(self.columns(), astuple(self))
        )


def evaluate(denoised, ground_truth, runtime_seconds=0.0):
    """Full quality report of ``denoised`` against ``ground_truth``.

    Metrics needing a one-to-one correspondence (MSAE, vertex error,
    reference-mode flips) require matching counts; the volume is NaN for an
    open mesh.
    """
    vol = enclosed_volume(denoised) if denoised.is_closed else math.nan
    return QualityReport(
        e_v=e_v(denoised, ground_truth),
        msae=msae(denoised, ground_truth),
        avg_vertex_error=avg_vertex_error(denoised, ground_truth)[0],
        mean_curvature_energy=mean_curvature_energy(denoised),
        flipped_faces=int(flipped_faces(denoised, ground_truth).size),
        enclosed_volume=vol,
        runtime_seconds=float(runtime_seconds),
    )
