"""Half-kernel Laplacian operator and the iterative denoising driver.

Each vertex's one-ring is cut into two half windows once per neighbor. For the
start neighbor ``v_k`` the partner is the other neighbor closest to the plane
through the vertex, the ring centroid and ``v_k``; the ring is then split by
the plane through the vertex, ``v_k`` and that partner, both endpoints being
kept on both sides. The uniform Laplacian of every half window is projected
onto the full-window normal, and the projection with the smallest
regularization energy drives an explicit diffusion step.

:func:`generate_half_windows` and :func:`half_kernel_laplacian` are the
per-vertex reference path. :func:`denoise` runs the same selection through a
compiled (or vectorized numpy) sweep; see :mod:`hlo_denoise._kernels`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .errors import IsolatedVertex, NoCandidate, TooFewNeighbors
from .laplacian import FlowConfig, flow_step
from .mesh import neighborhood


class EnergyMode(str, Enum):
    #: ``|delta| + |v^t - v^0|`` as printed; the data term is the same for all candidates
    LITERAL = "literal"
    #: ``|delta| + |(v^t - step * delta) - v^0|``
    CANDIDATE_POSITION = "candidate_position"


@dataclass(frozen=True)
class HloConfig:
    iterations: int
    step: float = 1.0
    fix_boundaries: bool = True
    energy_mode: EnergyMode = EnergyMode.LITERAL
    random_ties: bool = False
    rng_seed: int = 0

    def __post_init__(self):
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations}")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        object.__setattr__(self, "energy_mode", EnergyMode(self.energy_mode))
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")


@dataclass(frozen=True)
class HalfWindowPair:
    start: int
    paired: int
    left: np.ndarray
    right: np.ndarray


@dataclass(frozen=True)
class HloCandidate:
    subset: np.ndarray | None
    raw: np.ndarray
    projected: np.ndarray
    energy: float
    pair: HalfWindowPair | None = None
    side: str | None = None


@dataclass
class IterationStats:
    iteration: int
    avg_displacement: float
    total_delta_norm: float
    status_counts: dict = field(default_factory=dict)


def _pick(dist, candidates, keys, eps):
    """Index (into ``candidates``) of the closest entry; near-ties go to the lowest key."""
    d = dist[candidates]
    tied = candidates[d <= d.min() + eps]
    return tied[np.argmin(keys[tied])]


def generate_half_windows(mesh, nbh, eps=None, tie_keys=None):
    """Enumerate one :class:`HalfWindowPair` per neighbor of ``nbh.center``.

    ``tie_keys`` (one float per neighbor, in ``nbh.neighbors`` order) breaks
    equal-distance ties; the default prefers the lowest vertex index.
    """
    nbrs = np.asarray(nbh.neighbors)
    k = nbrs.size
    if k < 3:
        raise TooFewNeighbors(f"vertex {nbh.center} has {k} neighbors; half windows need 3")
    if eps is None:
        eps = mesh.eps()
    keys = nbrs.astype(np.float64) if tie_keys is None else np.asarray(tie_keys, dtype=np.float64)

    p = mesh.positions[nbh.center]
    X = mesh.positions[nbrs] - p
    a = nbh.centroid - p
    a_len = np.linalg.norm(a)
    pairs = []
    for s in range(k):
        b = X[s]
        others = np.delete(np.arange(k), s)
        m = np.cross(a, b)
        m_len = np.linalg.norm(m)
        plane = a_len >= eps and m_len / a_len >= eps
        if plane:
            dist = np.abs(X @ (m / m_len))
        else:
            # vertex, centroid and start are colinear: measure distance to that line
            axis = a / a_len if a_len >= eps else b / np.linalg.norm(b)
            dist = np.linalg.norm(np.cross(axis, X), axis=1)
        paired = _pick(dist, others, keys, eps)

        split = np.cross(b, X[paired])
        split_len = np.linalg.norm(split)
        if split_len <= eps * np.linalg.norm(b):
            # start and partner are colinear with the vertex; fall back to the selection plane
            split, split_len = (m, m_len) if plane else (None, 0.0)
        left, right = [], []
        for j in range(k):
            if j in (s, paired):
                left.append(j)
                right.append(j)
            elif split is not None and X[j] @ split / split_len > eps:
                right.append(j)
            else:
                left.append(j)
        pairs.append(HalfWindowPair(int(nbrs[s]), int(nbrs[paired]), nbrs[left], nbrs[right]))
    return pairs


def _energy(delta, v, v0, step, mode):
    if mode is EnergyMode.CANDIDATE_POSITION:
        return float(np.linalg.norm(delta) + np.linalg.norm(v - step * delta - v0))
    return float(np.linalg.norm(delta) + np.linalg.norm(v - v0))


def half_kernel_candidates(mesh, v, v0, cfg, eps=None, tie_keys=None):
    """All ``2 |NV(v)|`` projected half-window Laplacians of vertex ``v``, in order.

    Returns ``(candidates, normal)``; the list is empty when the local normal
    is undefined.
    """
    if eps is None:
        eps = mesh.eps()
    nbh = neighborhood(mesh, v, eps)
    n = nbh.local_normal
    if n is None:
        return [], None
    p = mesh.positions[v]
    out = []
    for pair in generate_half_windows(mesh, nbh, eps, tie_keys):
        for side, subset in (("left", pair.left), ("right", pair.right)):
            d = (p - mesh.positions[subset]).mean(axis=0)
            delta = (d @ n) * n
            out.append(HloCandidate(
                subset, d, delta, _energy(delta, p, v0, cfg.step, cfg.energy_mode), pair, side,
            ))
    return out, n


def half_kernel_laplacian(mesh, v, v0, cfg, eps=None, tie_keys=None):
    """Select the half-kernel Laplacian of vertex ``v`` with the lowest energy.

    ``v0`` is the vertex's position in the original (noisy) input. A vertex
    lying on its ring centroid gets a zero Laplacian; a vertex with fewer than
    three neighbors uses its full ring.
    """
    if eps is None:
        eps = mesh.eps()
    nbh = neighborhood(mesh, v, eps)
    p = mesh.positions[v]
    v0 = np.asarray(v0, dtype=np.float64)
    if nbh.local_normal is None:
        zero = np.zeros(3)
        return HloCandidate(None, zero, zero, _energy(zero, p, v0, cfg.step, cfg.energy_mode))
    if nbh.neighbors.size < 3:
        d = p - nbh.centroid
        delta = (d @ nbh.local_normal) * nbh.local_normal
        return HloCandidate(
            nbh.neighbors, d, delta, _energy(delta, p, v0, cfg.step, cfg.energy_mode)
        )

    candidates, _ = half_kernel_candidates(mesh, v, v0, cfg, eps, tie_keys)
    best, best_e = None, _kernels.E_INIT
    for cand in candidates:
        if cand.energy < best_e:
            best, best_e = cand, cand.energy
    if best is None:
        raise NoCandidate(
            f"vertex {v}: every half-window energy is >= {_kernels.E_INIT:g}; "
            "rescale the mesh"
        )
    return best


def denoise(mesh, cfg, on_iteration=None, backend=None):
    """Smooth ``mesh`` with ``cfg.iterations`` half-kernel diffusion sweeps.

    Every sweep evaluates all free vertices against a frozen copy of the
    current positions (Jacobi update) and against the input positions, then
    moves each vertex by ``-step * delta``. ``on_iteration(t, positions)`` is
    called after each sweep.

    Returns ``(denoised_mesh, trace)`` where ``trace`` holds one
    :class:`IterationStats` per sweep.
    """
    if (mesh.degrees == 0).any():
        raise IsolatedVertex(f"vertex {int(np.argmax(mesh.degrees == 0))} has no neighbors")
    sweep = _kernels.get_sweep(backend)
    eps = mesh.eps()
    flow = FlowConfig(step=cfg.step, iterations=cfg.iterations, fix_boundaries=cfg.fix_boundaries)
    fixed = mesh.boundary_vertex if cfg.fix_boundaries else np.zeros(mesh.n_vertices, bool)
    active = ~fixed
    candidate_mode = cfg.energy_mode is EnergyMode.CANDIDATE_POSITION
    rng = np.random.default_rng(cfg.rng_seed) if cfg.random_ties else None
    index_keys = mesh.neighbor_indices.astype(np.float64)

    pos0 = mesh.positions.copy()
    p = pos0.copy()
    trace = []
    for t in range(1, cfg.iterations + 1):
        keys = rng.random(index_keys.size) if rng is not None else index_keys
        delta, _, status = sweep(
            p, pos0, mesh.neighbor_offsets, mesh.neighbor_indices, active,
            cfg.step, candidate_mode, keys, eps,
        )
        bad = np.flatnonzero(status == _kernels.STATUS_NO_CANDIDATE)
        if bad.size:
            raise NoCandidate(
                f"iteration {t}: {bad.size} vertices (first {int(bad[0])}) have every "
                f"half-window energy >= {_kernels.E_INIT:g}; rescale the mesh"
            )
        new = flow_step(p, delta, flow, fixed)
        counts = np.bincount(status, minlength=5)
        trace.append(IterationStats(
            iteration=t,
            avg_displacement=float(np.linalg.norm(new - p, axis=1).mean()),
            total_delta_norm=float(np.linalg.norm(delta, axis=1).sum()),
            status_counts={
                "null_normal": int(counts[_kernels.STATUS_NULL_NORMAL]),
                "full_ring": int(counts[_kernels.STATUS_FALLBACK]),
                "half_window": int(counts[_kernels.STATUS_HALF_WINDOW]),
            },
        ))
        p = new
        if on_iteration is not None:
            on_iteration(t, p)
    return mesh.with_positions(p), trace
