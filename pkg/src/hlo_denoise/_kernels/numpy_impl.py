"""Vectorized numpy half-kernel sweep.

Vertices are bucketed by degree so every bucket becomes dense
``(m, k, k)`` tensor work. Semantics match :mod:`.numba_impl` exactly;
results agree to rounding.
"""
import numpy as np

from .common import (
    E_INIT,
    STATUS_FALLBACK,
    STATUS_HALF_WINDOW,
    STATUS_NO_CANDIDATE,
    STATUS_NULL_NORMAL,
)


def _norm(a):
    return np.sqrt(np.einsum("...c,...c->...", a, a))


def hlo_sweep(pos, pos0, offsets, indices, active, step, candidate_mode, keys, eps):
    n = pos.shape[0]
    delta = np.zeros((n, 3))
    energy = np.zeros(n)
    status = np.zeros(n, dtype=np.int8)

    deg = np.diff(offsets)
    act = np.flatnonzero(active)
    if act.size == 0:
        return delta, energy, status

    sums = np.add.reduceat(pos[indices], offsets[:-1], axis=0)
    centroid = sums[act] / deg[act, None]
    w = pos[act] - centroid
    wn = _norm(w)
    data0 = pos[act] - pos0[act]

    null = wn < eps
    v_null = act[null]
    status[v_null] = STATUS_NULL_NORMAL
    energy[v_null] = _norm(data0[null])

    safe = np.where(null, 1.0, wn)
    nrm = w / safe[:, None]

    def _energy(dn, n_vec, d0):
        # dn: (..., C) signed lengths along n_vec (..., 3); d0: (..., 3)
        if candidate_mode:
            moved = d0[..., None, :] - step * dn[..., None] * n_vec[..., None, :]
            return np.abs(dn) + _norm(moved)
        return np.abs(dn) + _norm(d0)[..., None]

    small = ~null & (deg[act] < 3)
    if small.any():
        v_small = act[small]
        dn = np.einsum("ij,ij->i", w[small], nrm[small])
        delta[v_small] = dn[:, None] * nrm[small]
        energy[v_small] = _energy(dn[:, None], nrm[small], data0[small])[:, 0]
        status[v_small] = STATUS_FALLBACK

    main = ~null & (deg[act] >= 3)
    for k in np.unique(deg[act][main]):
        sel = main & (deg[act] == k)
        v = act[sel]
        ar = np.arange(k)
        rows = offsets[v][:, None] + ar
        X = pos[indices[rows]] - pos[v][:, None, :]  # (m, k, 3) neighbors relative to v
        N = nrm[sel]
        A = -w[sel]  # centroid - v
        WN = wn[sel]
        bn = np.einsum("mkc,mc->mk", X, N)

        # plane through v, centroid and each start neighbor
        M = np.cross(A[:, None, :], X)
        Mn = _norm(M)
        plane = Mn / WN[:, None] >= eps
        Mhat = M / np.where(Mn > 0, Mn, 1.0)[..., None]
        dist_plane = np.abs(np.einsum("msc,mjc->msj", Mhat, X))
        dist_line = _norm(np.cross(N[:, None, :], X))
        dist = np.where(plane[:, :, None], dist_plane, dist_line[:, None, :])
        dist[:, ar, ar] = np.inf
        dmin = dist.min(axis=-1, keepdims=True)
        tie = dist <= dmin + eps
        K = keys[rows][:, None, :]
        paired = np.argmin(np.where(tie, K, np.inf), axis=-1)  # (m, k)

        # splitting plane through v, start and paired neighbor
        R = np.take_along_axis(X, paired[..., None], axis=1)
        SN = np.cross(X, R)
        SNn = _norm(SN)
        use_sn = SNn > eps * _norm(X)
        has = use_sn | plane
        SNsel = np.where(use_sn[..., None], SN, np.where(plane[..., None], M, 0.0))
        SNnorm = np.where(use_sn, SNn, np.where(plane, Mn, 1.0))
        SNhat = SNsel / SNnorm[..., None]
        sd = np.einsum("msc,mjc->msj", SNhat, X)

        j = ar[None, None, :]
        endpoint = (j == ar[None, :, None]) | (j == paired[..., None])
        right = has[..., None] & (sd > eps) & ~endpoint
        left = ~right & ~endpoint

        e_sum = bn + np.take_along_axis(bn, paired, axis=1)
        bnj = bn[:, None, :]
        dn_left = -((left * bnj).sum(-1) + e_sum) / (left.sum(-1) + 2)
        dn_right = -((right * bnj).sum(-1) + e_sum) / (right.sum(-1) + 2)
        dn = np.stack([dn_left, dn_right], axis=-1).reshape(len(v), 2 * k)

        E = _energy(dn, N, data0[sel])
        best = np.argmin(E, axis=1)
        best_e = E[np.arange(len(v)), best]
        best_dn = dn[np.arange(len(v)), best]
        found = best_e < E_INIT
        delta[v] = np.where(found[:, None], best_dn[:, None] * N, 0.0)
        energy[v] = np.where(found, best_e, np.inf)
        status[v] = np.where(found, STATUS_HALF_WINDOW, STATUS_NO_CANDIDATE)
    return delta, energy, status
