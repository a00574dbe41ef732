"""Pure numpy implementations of the hot loops in ``_ckernels.pyx``.

Every function has the same signature and return value as its compiled
twin, so the two are interchangeable (and cross-checked in the tests).
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

KUHN_TETS = np.array([[0, 1, 3, 7], [0, 1, 5, 7], [0, 2, 3, 7],
                      [0, 2, 6, 7], [0, 4, 5, 7], [0, 4, 6, 7]])
KUHN_TRIS = np.array([[0, 1, 3], [0, 2, 3]])
CUBE_CORNERS = np.array([[c & 1, (c >> 1) & 1, (c >> 2) & 1] for c in range(8)], dtype=float)
SQUARE_CORNERS = np.array([[c & 1, (c >> 1) & 1] for c in range(4)], dtype=float)

_CHUNK = 1 << 21


def _ranges(starts: np.ndarray, lens: np.ndarray) -> np.ndarray:
    """Concatenation of ``arange(s, s + l)`` for each (s, l)."""
    lens = np.asarray(lens, dtype=np.int64)
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offs = np.repeat(np.cumsum(lens) - lens, lens)
    return np.repeat(np.asarray(starts, dtype=np.int64), lens) + (np.arange(total) - offs)


def census_scan(pts, neg, pi, pj, bstart, bneg, list_cap):
    sizes = np.diff(bstart)
    work = sizes * sizes[bneg]
    total = nondeg = 0
    fam = np.zeros(3, dtype=np.int64)
    diag = np.zeros(3, dtype=np.int64)
    listed = []
    nlisted = 0
    overflow = False
    masks = [[(m >> s) & 1 for s in range(4)] for m in range(1, 15)]

    cum = np.cumsum(work)
    lo = 0
    while lo < len(work):
        base = cum[lo - 1] if lo else 0
        hi = max(lo + 1, int(np.searchsorted(cum, base + _CHUNK, side="right")))
        bs = np.arange(lo, hi)
        lo = hi
        s = sizes[bs]
        sc = sizes[bneg[bs]]
        # each pair of bucket b meets every pair of its partner bucket -b
        p = np.repeat(_ranges(bstart[bs], s), np.repeat(sc, s))
        q = _ranges(np.repeat(bstart[bneg[bs]], s), np.repeat(sc, s))
        t = np.stack([pi[p], pj[p], pi[q], pj[q]], axis=1)
        total += len(t)
        in_a = (t[:, 1] == neg[t[:, 0]]) & (t[:, 3] == neg[t[:, 2]])
        in_b = (t[:, 2] == neg[t[:, 0]]) & (t[:, 3] == neg[t[:, 1]])
        in_c = (t[:, 3] == neg[t[:, 0]]) & (t[:, 2] == neg[t[:, 1]])
        fam += [in_a.sum(), in_b.sum(), in_c.sum()]
        diag += [(in_a & in_b).sum(), (in_a & in_c).sum(), (in_b & in_c).sum()]
        coords = pts[t]  # (T, 4, d)
        degenerate = np.zeros(len(t), dtype=bool)
        for m in masks:
            ssum = (coords * np.array(m)[None, :, None]).sum(axis=1)
            degenerate |= ~ssum.any(axis=1)
        good = t[~degenerate]
        nondeg += len(good)
        if list_cap > 0:
            room = list_cap - nlisted
            if len(good) > room:
                overflow = True
            if room > 0:
                listed.append(good[:room])
                nlisted += min(room, len(good))
    out = np.concatenate(listed) if listed else np.empty((0, 4), dtype=np.int64)
    return (int(total), int(nondeg), tuple(int(x) for x in fam),
            tuple(int(x) for x in diag), out.astype(np.int64), overflow)


def pair_accumulate(a, pi, pj, bucket, w, nbuckets):
    M = a.shape[0]
    P, K = w.shape
    inc = sp.csr_matrix((np.ones(P), (bucket, np.arange(P))), shape=(nbuckets, P))
    out = np.zeros((M, nbuckets, K), dtype=np.complex128)
    step = max(1, _CHUNK // max(P, 1))
    for r0 in range(0, M, step):
        prod = a[r0:r0 + step, pi] * a[r0:r0 + step, pj]
        for k in range(K):
            out[r0:r0 + step, :, k] = (inc @ (prod * w[:, k]).T).T
    return out


def _cells(f: np.ndarray, offsets: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Corner values of cells with first index in [lo, hi), shape (cells, corners)."""
    G = f.shape
    cols = []
    for off in offsets.astype(int):
        idx = [np.arange(lo, hi) + off[0]] + [np.arange(g) + o for g, o in zip(G[1:], off[1:])]
        block = f
        for ax, ix in enumerate(idx):
            block = np.take(block, ix, axis=ax, mode="wrap")
        cols.append(block.reshape(-1))
    return np.stack(cols, axis=1)


def _slabs(G0: int, cells_per_slice: int):
    step = max(1, _CHUNK // max(cells_per_slice, 1))
    for lo in range(0, G0, step):
        yield lo, min(G0, lo + step)


def _cross_norm(u, v):
    return np.linalg.norm(np.cross(u, v), axis=-1)


def tet_surface_area(f):
    f = np.asarray(f, dtype=np.float64)
    total = 0.0
    for lo, hi in _slabs(f.shape[0], f.shape[1] * f.shape[2]):
        vals = _cells(f, CUBE_CORNERS, lo, hi)
        vals = np.where(vals == 0.0, 1e-12, vals)
        pos = vals > 0
        mixed = pos.any(axis=1) & ~pos.all(axis=1)
        vals = vals[mixed]
        for tet in KUHN_TETS:
            v = vals[:, tet]
            P = CUBE_CORNERS[tet]
            ispos = v > 0
            npos = ispos.sum(axis=1)
            order = np.argsort(~ispos, axis=1, kind="stable")  # positives first
            vs = np.take_along_axis(v, order, axis=1)
            ps = P[order]  # (m, 4, 3)

            def edge(i, j, sub, vs=vs, ps=ps):
                vi, vj = vs[sub, i], vs[sub, j]
                s = vi / (vi - vj)
                return ps[sub, i] + s[:, None] * (ps[sub, j] - ps[sub, i])

            one = npos == 1
            if one.any():
                sub = np.flatnonzero(one)
                e = [edge(0, j, sub) for j in (1, 2, 3)]
                total += 0.5 * _cross_norm(e[1] - e[0], e[2] - e[0]).sum()
            three = npos == 3
            if three.any():
                sub = np.flatnonzero(three)
                e = [edge(3, j, sub) for j in (0, 1, 2)]
                total += 0.5 * _cross_norm(e[1] - e[0], e[2] - e[0]).sum()
            two = npos == 2
            if two.any():
                sub = np.flatnonzero(two)
                e0, e1, e2, e3 = (edge(0, 2, sub), edge(0, 3, sub),
                                  edge(1, 3, sub), edge(1, 2, sub))
                total += 0.5 * _cross_norm(e1 - e0, e2 - e0).sum()
                total += 0.5 * _cross_norm(e2 - e0, e3 - e0).sum()
    return float(total)


def tri_contour_length(f):
    f = np.asarray(f, dtype=np.float64)
    vals = _cells(f, SQUARE_CORNERS, 0, f.shape[0])
    vals = np.where(vals == 0.0, 1e-12, vals)
    total = 0.0
    for tri in KUHN_TRIS:
        v = vals[:, tri]
        P = SQUARE_CORNERS[tri]
        ispos = v > 0
        npos = ispos.sum(axis=1)
        mixed = (npos == 1) | (npos == 2)
        v, ispos, npos = v[mixed], ispos[mixed], npos[mixed]
        # the lone vertex is the positive one if npos == 1, else the negative one
        lone_mask = np.where((npos == 1)[:, None], ispos, ~ispos)
        order = np.argsort(~lone_mask, axis=1, kind="stable")
        vs = np.take_along_axis(v, order, axis=1)
        ps = P[order]
        s1 = vs[:, 0] / (vs[:, 0] - vs[:, 1])
        s2 = vs[:, 0] / (vs[:, 0] - vs[:, 2])
        a = ps[:, 0] + s1[:, None] * (ps[:, 1] - ps[:, 0])
        b = ps[:, 0] + s2[:, None] * (ps[:, 2] - ps[:, 0])
        total += np.linalg.norm(a - b, axis=1).sum()
    return float(total)


def _tet_cdf(v, t):
    """Volume fraction where a linear function is <= t; ``v`` sorted, shape (m, 4)."""
    v0, v1, v2, v3 = v.T
    out = np.zeros(len(v))
    with np.errstate(divide="ignore", invalid="ignore"):
        a = t - v0
        b = t - v1
        c2 = v2 - t
        c3 = v3 - t
        k1 = (t >= v0) & (t < v1)
        k2 = (t >= v1) & (t < v2)
        k3 = (t >= v2) & (t < v3)
        out = np.where(k1, a**3 / ((v1 - v0) * (v2 - v0) * (v3 - v0)), out)
        mid = ((a * a * b * b + a * b * (a + b) * (c2 + c3) + c2 * c3 * (a * a + a * b + b * b))
               / ((a + c2) * (a + c3) * (b + c2) * (b + c3)))
        out = np.where(k2, mid, out)
        out = np.where(k3, 1.0 - c3**3 / ((v3 - v0) * (v3 - v1) * (v3 - v2)), out)
    return np.where(t >= v3, 1.0, out)


def _tri_cdf(v, t):
    v0, v1, v2 = v.T
    out = np.zeros(len(v))
    with np.errstate(divide="ignore", invalid="ignore"):
        k1 = (t >= v0) & (t < v1)
        k2 = (t >= v1) & (t < v2)
        out = np.where(k1, (t - v0) ** 2 / ((v1 - v0) * (v2 - v0)), out)
        out = np.where(k2, 1.0 - (v2 - t) ** 2 / ((v2 - v0) * (v2 - v1)), out)
    return np.where(t >= v2, 1.0, out)


def tet_band_integral(f, g, eps):
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    total = 0.0
    for lo, hi in _slabs(f.shape[0], f.shape[1] * f.shape[2]):
        vals = _cells(f, CUBE_CORNERS, lo, hi)
        keep = (vals.min(axis=1) <= eps) & (vals.max(axis=1) >= -eps)
        vals = vals[keep]
        gv = _cells(g, CUBE_CORNERS, lo, hi)[keep]
        for tet in KUHN_TETS:
            v = np.sort(vals[:, tet], axis=1)
            frac = _tet_cdf(v, eps) - _tet_cdf(v, -eps)
            total += (frac * gv[:, tet].mean(axis=1)).sum() / 6.0
    return float(total)


def tri_band_integral(f, g, eps):
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    vals = _cells(f, SQUARE_CORNERS, 0, f.shape[0])
    gv = _cells(g, SQUARE_CORNERS, 0, f.shape[0])
    total = 0.0
    for tri in KUHN_TRIS:
        v = np.sort(vals[:, tri], axis=1)
        frac = _tri_cdf(v, eps) - _tri_cdf(v, -eps)
        total += (frac * gv[:, tri].mean(axis=1)).sum() / 2.0
    return float(total)


def pair_gram(a, pi, pj, bstart, bneg, w):
    nb = len(bstart) - 1
    bucket = np.repeat(np.arange(nb), np.diff(bstart))
    out = np.empty((a.shape[0], w.shape[1], w.shape[1]))
    step = max(1, _CHUNK // max(nb * w.shape[1], 1))
    for r0 in range(0, a.shape[0], step):
        T = pair_accumulate(a[r0:r0 + step], pi, pj, bucket, w, nb)
        out[r0:r0 + step] = np.einsum("mvp,mvq->mpq", T, np.conj(T)).real
    return out
