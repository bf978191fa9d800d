"""Independent brute-force re-derivations used as test oracles.

Written with plain Python floats and loops so they share no code path with
the library (which works on numpy arrays, vectorized or compiled).
"""
import math


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _len(a):
    return math.sqrt(_dot(a, a))


def ring(faces, v):
    out = set()
    for f in faces:
        if v in f:
            out.update(int(x) for x in f if x != v)
    return sorted(out)


def candidate_energies(positions, faces, v, v0, eps, step=1.0, mode="literal", nbrs=None):
    """All 2|NV| half-window energies of vertex ``v``, enumerated from scratch.

    Returns a list of ``(energy, projected_length, subset)``; empty when the
    vertex sits on its ring centroid.
    """
    P = [tuple(map(float, p)) for p in positions]
    nbrs = ring(faces, v) if nbrs is None else list(nbrs)
    k = len(nbrs)
    p = P[v]
    c = tuple(sum(P[j][a] for j in nbrs) / k for a in range(3))
    w = _sub(p, c)
    wl = _len(w)
    if wl < eps:
        return []
    n = tuple(x / wl for x in w)
    data = _len(_sub(p, tuple(map(float, v0))))
    rel = {j: _sub(P[j], p) for j in nbrs}
    out = []
    for s in nbrs:
        m = _cross(_sub(c, p), rel[s])
        ml = _len(m)
        if ml / wl >= eps:
            dist = {j: abs(_dot(m, rel[j])) / ml for j in nbrs if j != s}
        else:
            dist = {j: _len(_cross(n, rel[j])) for j in nbrs if j != s}
        lo = min(dist.values())
        partner = min(j for j in dist if dist[j] <= lo + eps)
        sn = _cross(rel[s], rel[partner])
        snl = _len(sn)
        if not snl > eps * _len(rel[s]):
            sn, snl = (m, ml) if ml / wl >= eps else (None, 0.0)
        left, right = [s, partner], [s, partner]
        for j in nbrs:
            if j in (s, partner):
                continue
            if sn is not None and _dot(sn, rel[j]) / snl > eps:
                right.append(j)
            else:
                left.append(j)
        for subset in (left, right):
            d = tuple(sum(p[a] - P[j][a] for j in subset) / len(subset) for a in range(3))
            dn = _dot(d, n)
            if mode == "literal":
                e = abs(dn) + data
            else:
                moved = tuple(p[a] - step * dn * n[a] - float(v0[a]) for a in range(3))
                e = abs(dn) + _len(moved)
            out.append((e, dn, sorted(subset)))
    return out


def cot_weights_loop(positions, faces):
    """``{(i, j): w_ij}`` with ``w = (cot a + cot b) / 2`` via explicit angles."""
    w = {}
    for f in faces:
        f = [int(x) for x in f]
        for k in range(3):
            o, i, j = f[k], f[(k + 1) % 3], f[(k + 2) % 3]
            u = _sub(positions[i], positions[o])
            v = _sub(positions[j], positions[o])
            ang = math.acos(max(-1.0, min(1.0, _dot(u, v) / (_len(u) * _len(v)))))
            cot = math.cos(ang) / math.sin(ang)
            for key in ((i, j), (j, i)):
                w[key] = w.get(key, 0.0) + 0.5 * cot
    return w
