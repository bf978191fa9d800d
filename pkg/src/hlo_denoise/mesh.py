"""Indexed triangle mesh with precomputed one-ring adjacency."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFace,
    EmptyMesh,
    GeometricallyDegenerateFace,
    IndexOutOfRange,
    IsolatedVertex,
)

#: Degeneracy tolerance, relative to the bounding-box diagonal.
EPS_REL = 1e-12


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MeshHealth:
    nonmanifold_edges: int
    boundary_edges: int
    isolated_vertices: int

    @property
    def is_manifold(self):
        return self.nonmanifold_edges == 0


class TriMesh:
    """Immutable triangle mesh.

    Adjacency is stored in CSR form so it can be handed straight to the
    compiled kernels: the neighbors of vertex ``i`` are
    ``neighbor_indices[neighbor_offsets[i]:neighbor_offsets[i + 1]]`` in
    ascending index order. Incident faces use the same layout.

    Use :func:`build_mesh` to construct one; :meth:`with_positions` returns a
    mesh sharing this topology but carrying new coordinates.
    """

    __slots__ = (
        "positions",
        "faces",
        "neighbor_offsets",
        "neighbor_indices",
        "face_offsets",
        "face_indices",
        "boundary_vertex",
        "edges",
        "edge_face_count",
    )

    def __init__(self, positions, faces, topology):
        self.positions = _frozen(np.asarray(positions, dtype=np.float64))
        self.faces = faces
        (
            self.neighbor_offsets,
            self.neighbor_indices,
            self.face_offsets,
            self.face_indices,
            self.boundary_vertex,
            self.edges,
            self.edge_face_count,
        ) = topology

    def _topology(self):
        return (
            self.neighbor_offsets,
            self.neighbor_indices,
            self.face_offsets,
            self.face_indices,
            self.boundary_vertex,
            self.edges,
            self.edge_face_count,
        )

    def __setattr__(self, name, value):
        if hasattr(self, name):
            raise AttributeError(f"TriMesh is immutable ({name!r})")
        object.__setattr__(self, name, value)

    def __repr__(self):
        return f"TriMesh(n_vertices={self.n_vertices}, n_faces={self.n_faces})"

    @property
    def n_vertices(self):
        return self.positions.shape[0]

    @property
    def n_faces(self):
        return self.faces.shape[0]

    @property
    def degrees(self):
        return np.diff(self.neighbor_offsets)

    @property
    def vertex_neighbors(self):
        """Per-vertex neighbor arrays (a list view over the CSR storage)."""
        off, idx = self.neighbor_offsets, self.neighbor_indices
        return [idx[off[i]:off[i + 1]] for i in range(self.n_vertices)]

    @property
    def vertex_faces(self):
        off, idx = self.face_offsets, self.face_indices
        return [idx[off[i]:off[i + 1]] for i in range(self.n_vertices)]

    def neighbors(self, v):
        return self.neighbor_indices[self.neighbor_offsets[v]:self.neighbor_offsets[v + 1]]

    def incident_faces(self, v):
        return self.face_indices[self.face_offsets[v]:self.face_offsets[v + 1]]

    @property
    def is_closed(self):
        return not bool(self.boundary_vertex.any())

    def bbox_diagonal(self):
        return float(np.linalg.norm(self.positions.max(axis=0) - self.positions.min(axis=0)))

    def eps(self):
        """Absolute degeneracy tolerance for this mesh's scale."""
        diag = self.bbox_diagonal()
        return EPS_REL * (diag if diag > 0 else 1.0)

    def health(self):
        return MeshHealth(
            nonmanifold_edges=int(np.count_nonzero(self.edge_face_count > 2)),
            boundary_edges=int(np.count_nonzero(self.edge_face_count == 1)),
            isolated_vertices=int(np.count_nonzero(self.degrees == 0)),
        )

    def with_positions(self, positions):
        positions = np.asarray(positions, dtype=np.float64)
        if positions.shape != self.positions.shape:
            raise ValueError(
                f"positions shape {positions.shape} does not match {self.positions.shape}"
            )
        return TriMesh(positions, self.faces, self._topology())


def build_mesh(positions, faces):
    """Validate raw arrays and build a :class:`TriMesh` with full adjacency."""
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    faces = np.asarray(faces, dtype=np.int64)
    if faces.size == 0:
        raise EmptyMesh("mesh has no faces")
    faces = faces.reshape(-1, 3)
    n = positions.shape[0]
    if faces.min() < 0 or faces.max() >= n:
        bad = int(np.flatnonzero((faces < 0) | (faces >= n)).min() // 3)
        raise IndexOutOfRange(f"face {bad} references a vertex outside [0, {n})")
    a, b, c = faces.T
    degenerate = (a == b) | (b == c) | (a == c)
    if degenerate.any():
        raise DegenerateFace(f"face {int(np.argmax(degenerate))} repeats a vertex index")

    # undirected edges with incidence counts
    e = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    e.sort(axis=1)
    edges, counts = np.unique(e, axis=0, return_counts=True)

    # symmetric CSR neighbor lists, ascending within each row
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    nbr_off = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=nbr_off[1:])

    flat = faces.ravel()
    forder = np.argsort(flat, kind="stable")
    face_off = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(flat, minlength=n), out=face_off[1:])

    boundary = np.zeros(n, dtype=bool)
    boundary[edges[counts == 1].ravel()] = True

    topology = (
        _frozen(nbr_off),
        _frozen(dst.astype(np.int64)),
        _frozen(face_off),
        _frozen((forder // 3).astype(np.int64)),
        _frozen(boundary),
        _frozen(edges),
        _frozen(counts),
    )
    return TriMesh(positions, _frozen(faces), topology)


@dataclass(frozen=True)
class VertexNeighborhood:
    center: int
    neighbors: np.ndarray
    centroid: np.ndarray
    local_normal: np.ndarray | None


def neighborhood(mesh, v, eps=None):
    """One-ring of ``v`` with its centroid and the normalized ``v - centroid``.

    ``local_normal`` is ``None`` when the vertex sits on its centroid (within
    ``eps``, which defaults to the mesh's relative tolerance).
    """
    if not 0 <= v < mesh.n_vertices:
        raise IndexOutOfRange(f"vertex {v} outside [0, {mesh.n_vertices})")
    nbrs = mesh.neighbors(v)
    if nbrs.size == 0:
        raise IsolatedVertex(f"vertex {v} has no neighbors")
    if eps is None:
        eps = mesh.eps()
    centroid = mesh.positions[nbrs].mean(axis=0)
    w = mesh.positions[v] - centroid
    norm = np.linalg.norm(w)
    normal = w / norm if norm >= eps else None
    return VertexNeighborhood(int(v), nbrs, centroid, normal)


def mean_edge_length(mesh):
    if mesh.edges.size == 0:
        raise EmptyMesh("mesh has no edges")
    p = mesh.positions
    return float(np.linalg.norm(p[mesh.edges[:, 0]] - p[mesh.edges[:, 1]], axis=1).mean())


def face_cross(positions, faces):
    p0, p1, p2 = (positions[faces[:, k]] for k in range(3))
    return np.cross(p1 - p0, p2 - p0)


def face_areas(mesh):
    return 0.5 * np.linalg.norm(face_cross(mesh.positions, mesh.faces), axis=1)


def face_normals(mesh):
    """Unit normals of all faces; geometrically degenerate faces get zeros."""
    cr = face_cross(mesh.positions, mesh.faces)
    norm = np.linalg.norm(cr, axis=1)
    ok = norm > mesh.eps() ** 2
    out = np.zeros_like(cr)
    out[ok] = cr[ok] / norm[ok, None]
    return out


def face_normal(mesh, f):
    cr = face_cross(mesh.positions, mesh.faces[f:f + 1])[0]
    norm = np.linalg.norm(cr)
    # cross product carries length^2, so square the length tolerance
    if norm <= mesh.eps() ** 2:
        raise GeometricallyDegenerateFace(f"face {f} has (near) zero area")
    return cr / norm


def vertex_normals(mesh):
    """Area-weighted vertex normals (unit length; zeros where undefined)."""
    cr = face_cross(mesh.positions, mesh.faces)
    acc = np.zeros_like(mesh.positions)
    for k in range(3):
        np.add.at(acc, mesh.faces[:, k], cr)
    norm = np.linalg.norm(acc, axis=1)
    ok = norm > 0
    acc[ok] /= norm[ok, None]
    return acc
