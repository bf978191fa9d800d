"""Compiled half-kernel sweep: one pass over vertices, no temporaries."""
import math

import numpy as np
from numba import njit

from .common import (
    E_INIT,
    STATUS_FALLBACK,
    STATUS_HALF_WINDOW,
    STATUS_NO_CANDIDATE,
    STATUS_NULL_NORMAL,
)


@njit(cache=True, inline="always")
def _energy(dn, nx, ny, nz, d0x, d0y, d0z, step, candidate_mode):
    if candidate_mode:
        mx = d0x - step * dn * nx
        my = d0y - step * dn * ny
        mz = d0z - step * dn * nz
        return abs(dn) + math.sqrt(mx * mx + my * my + mz * mz)
    return abs(dn) + math.sqrt(d0x * d0x + d0y * d0y + d0z * d0z)


@njit(cache=True)
def _sweep(pos, pos0, offsets, indices, active, step, candidate_mode, keys, eps,
           delta, energy, status):
    n = pos.shape[0]
    maxdeg = 0
    for i in range(n):
        maxdeg = max(maxdeg, offsets[i + 1] - offsets[i])
    X = np.empty((maxdeg, 3))
    bn = np.empty(maxdeg)
    dist = np.empty(maxdeg)

    for i in range(n):
        if not active[i]:
            continue
        b = offsets[i]
        k = offsets[i + 1] - b
        px, py, pz = pos[i, 0], pos[i, 1], pos[i, 2]
        cx = cy = cz = 0.0
        for j in range(k):
            q = indices[b + j]
            X[j, 0] = pos[q, 0] - px
            X[j, 1] = pos[q, 1] - py
            X[j, 2] = pos[q, 2] - pz
            cx += pos[q, 0]
            cy += pos[q, 1]
            cz += pos[q, 2]
        cx /= k
        cy /= k
        cz /= k
        wx, wy, wz = px - cx, py - cy, pz - cz
        wn = math.sqrt(wx * wx + wy * wy + wz * wz)
        d0x = px - pos0[i, 0]
        d0y = py - pos0[i, 1]
        d0z = pz - pos0[i, 2]

        if wn < eps:
            status[i] = STATUS_NULL_NORMAL
            energy[i] = math.sqrt(d0x * d0x + d0y * d0y + d0z * d0z)
            continue
        nx, ny, nz = wx / wn, wy / wn, wz / wn

        if k < 3:
            dn = wx * nx + wy * ny + wz * nz
            delta[i, 0] = dn * nx
            delta[i, 1] = dn * ny
            delta[i, 2] = dn * nz
            energy[i] = _energy(dn, nx, ny, nz, d0x, d0y, d0z, step, candidate_mode)
            status[i] = STATUS_FALLBACK
            continue

        for j in range(k):
            bn[j] = X[j, 0] * nx + X[j, 1] * ny + X[j, 2] * nz
        ax, ay, az = -wx, -wy, -wz

        best = E_INIT
        best_dn = 0.0
        found = False
        for s in range(k):
            sx, sy, sz = X[s, 0], X[s, 1], X[s, 2]
            # plane through v, centroid, start
            mx = ay * sz - az * sy
            my = az * sx - ax * sz
            mz = ax * sy - ay * sx
            mn = math.sqrt(mx * mx + my * my + mz * mz)
            plane = mn / wn >= eps
            dmin = np.inf
            for j in range(k):
                if j == s:
                    continue
                xx, xy, xz = X[j, 0], X[j, 1], X[j, 2]
                if plane:
                    dj = abs(mx * xx + my * xy + mz * xz) / mn
                else:
                    lx = ny * xz - nz * xy
                    ly = nz * xx - nx * xz
                    lz = nx * xy - ny * xx
                    dj = math.sqrt(lx * lx + ly * ly + lz * lz)
                dist[j] = dj
                if dj < dmin:
                    dmin = dj
            paired = -1
            best_key = np.inf
            for j in range(k):
                if j != s and dist[j] <= dmin + eps and keys[b + j] < best_key:
                    best_key = keys[b + j]
                    paired = j

            rx, ry, rz = X[paired, 0], X[paired, 1], X[paired, 2]
            snx = sy * rz - sz * ry
            sny = sz * rx - sx * rz
            snz = sx * ry - sy * rx
            snn = math.sqrt(snx * snx + sny * sny + snz * snz)
            sn_len = math.sqrt(sx * sx + sy * sy + sz * sz)
            has = True
            if snn > eps * sn_len:
                pass
            elif plane:
                snx, sny, snz, snn = mx, my, mz, mn
            else:
                has = False

            e_sum = bn[s] + bn[paired]
            l_sum = e_sum
            r_sum = e_sum
            l_cnt = 2
            r_cnt = 2
            for j in range(k):
                if j == s or j == paired:
                    continue
                if has and (snx * X[j, 0] + sny * X[j, 1] + snz * X[j, 2]) / snn > eps:
                    r_sum += bn[j]
                    r_cnt += 1
                else:
                    l_sum += bn[j]
                    l_cnt += 1

            dn = -l_sum / l_cnt
            e = _energy(dn, nx, ny, nz, d0x, d0y, d0z, step, candidate_mode)
            if e < best:
                best = e
                best_dn = dn
                found = True
            dn = -r_sum / r_cnt
            e = _energy(dn, nx, ny, nz, d0x, d0y, d0z, step, candidate_mode)
            if e < best:
                best = e
                best_dn = dn
                found = True

        if found:
            delta[i, 0] = best_dn * nx
            delta[i, 1] = best_dn * ny
            delta[i, 2] = best_dn * nz
            energy[i] = best
            status[i] = STATUS_HALF_WINDOW
        else:
            energy[i] = np.inf
            status[i] = STATUS_NO_CANDIDATE


def hlo_sweep(pos, pos0, offsets, indices, active, step, candidate_mode, keys, eps):
    n = pos.shape[0]
    delta = np.zeros((n, 3))
    energy = np.zeros(n)
    status = np.zeros(n, dtype=np.int8)
    _sweep(
        np.ascontiguousarray(pos, dtype=np.float64),
        np.ascontiguousarray(pos0, dtype=np.float64),
        offsets, indices, active, float(step), bool(candidate_mode),
        np.ascontiguousarray(keys, dtype=np.float64), float(eps),
        delta, energy, status,
    )
    return delta, energy, status
