"""Synthetic test shapes: platonic solids, icospheres, subdivided cubes, grids."""
import numpy as np

from .mesh import build_mesh


def single_triangle():
    return build_mesh([[0, 0, 0], [1, 0, 0], [0.5, np.sqrt(3) / 2, 0]], [[0, 1, 2]])


def unit_square():
    return build_mesh([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], [[0, 1, 2], [0, 2, 3]])


def octahedron(radius=1.0):
    v = radius * np.array(
        [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float
    )
    f = [[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]]
    return build_mesh(v, f)


def _icosahedron():
    t = (1 + 5 ** 0.5) / 2
    v = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=float)
    f = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ])
    return v, f


def icosphere(subdivisions=2, radius=1.0):
    """Icosphere with ``10 * 4**subdivisions + 2`` vertices, outward winding."""
    v, f = _icosahedron()
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    for _ in range(subdivisions):
        e = np.sort(np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
        edges, inv = np.unique(e, axis=0, return_inverse=True)
        mid = v[edges].mean(axis=1)
        mid /= np.linalg.norm(mid, axis=1, keepdims=True)
        nf = len(f)
        m01, m12, m20 = (len(v) + inv.ravel()[k * nf:(k + 1) * nf] for k in range(3))
        a, b, c = f.T
        f = np.concatenate([
            np.stack([a, m01, m20], 1),
            np.stack([b, m12, m01], 1),
            np.stack([c, m20, m12], 1),
            np.stack([m01, m12, m20], 1),
        ])
        v = np.concatenate([v, mid])
    return build_mesh(radius * v, f)


def cube(segments=8, size=1.0):
    """Closed axis-aligned cube ``[0, size]^3`` with a regular grid on every side."""
    n = int(segments)
    if n < 1:
        raise ValueError("segments must be >= 1")
    ax = np.arange(n + 1)
    grid = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), -1).reshape(-1, 3)
    on_surface = ((grid == 0) | (grid == n)).any(axis=1)
    pts = grid[on_surface]
    lookup = -np.ones((n + 1,) * 3, dtype=np.int64)
    lookup[tuple(pts.T)] = np.arange(len(pts))

    # (fixed axis, fixed value, u axis, v axis) with u x v pointing outward
    sides = [(0, n, 1, 2), (0, 0, 2, 1), (1, n, 2, 0), (1, 0, 0, 2), (2, n, 0, 1), (2, 0, 1, 0)]
    faces = []
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i, j = i.ravel(), j.ravel()
    for axis, value, u, w in sides:
        def vid(du, dw):
            c = np.zeros((i.size, 3), dtype=np.int64)
            c[:, axis] = value
            c[:, u] = i + du
            c[:, w] = j + dw
            return lookup[c[:, 0], c[:, 1], c[:, 2]]
        a, b, c, d = vid(0, 0), vid(1, 0), vid(1, 1), vid(0, 1)
        faces += [np.stack([a, b, c], 1), np.stack([a, c, d], 1)]
    return build_mesh(pts * (size / n), np.concatenate(faces))


def plane_grid(nx=10, ny=10, size=1.0):
    """Open planar grid in ``z = 0`` with ``(nx + 1) * (ny + 1)`` vertices."""
    x, y = np.meshgrid(np.linspace(0, size, nx + 1), np.linspace(0, size, ny + 1), indexing="ij")
    v = np.stack([x.ravel(), y.ravel(), np.zeros(x.size)], 1)
    idx = np.arange(v.shape[0]).reshape(nx + 1, ny + 1)
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    f = np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])
    return build_mesh(v, f)


def vase(rings=40, segments=48, height=2.0):
    """Closed surface of revolution with a bulging body, a waist and capped ends."""
    z = np.linspace(0.0, height, rings)
    s = z / height
    r = 0.45 + 0.3 * np.sin(np.pi * s) ** 2 - 0.18 * np.sin(2.5 * np.pi * s) ** 2
    theta = np.linspace(0, 2 * np.pi, segments, endpoint=False)
    ring_pts = np.stack([
        (r[:, None] * np.cos(theta)).ravel(),
        (r[:, None] * np.sin(theta)).ravel(),
        np.repeat(z, segments),
    ], 1)
    v = np.concatenate([ring_pts, [[0, 0, 0.0], [0, 0, height]]])
    bottom, top = len(ring_pts), len(ring_pts) + 1
    idx = np.arange(rings * segments).reshape(rings, segments)
    nxt = np.roll(idx, -1, axis=1)
    a, b = idx[:-1].ravel(), nxt[:-1].ravel()
    c, d = nxt[1:].ravel(), idx[1:].ravel()
    f = [np.stack([a, b, c], 1), np.stack([a, c, d], 1)]
    f.append(np.stack([np.full(segments, bottom), nxt[0], idx[0]], 1))
    f.append(np.stack([np.full(segments, top), idx[-1], nxt[-1]], 1))
    return build_mesh(v, np.concatenate(f))
