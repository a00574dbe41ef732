# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Signatures mirror ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

# Kuhn (Freudenthal) decomposition of the unit cube: corner c has bits
# (x, y, z) = (c & 1, (c >> 1) & 1, (c >> 2) & 1).  Tet t walks from
# corner 0 to corner 7 adding one axis at a time.
cdef int[6][4] KUHN_TETS = [
    [0, 1, 3, 7], [0, 1, 5, 7], [0, 2, 3, 7],
    [0, 2, 6, 7], [0, 4, 5, 7], [0, 4, 6, 7],
]
# squares: corner c has bits (x, y) = (c & 1, (c >> 1) & 1)
cdef int[2][3] KUHN_TRIS = [[0, 1, 3], [0, 2, 3]]


def census_scan(const cnp.int64_t[:, ::1] pts, const cnp.int64_t[::1] neg,
                const cnp.int64_t[::1] pi, const cnp.int64_t[::1] pj,
                const cnp.int64_t[::1] bstart, const cnp.int64_t[::1] bneg,
                Py_ssize_t list_cap):
    cdef Py_ssize_t nb = bneg.shape[0], d = pts.shape[1]
    cdef Py_ssize_t b, c, p, q, m, k
    cdef long long total = 0, nondeg = 0
    cdef long long fa = 0, fb = 0, fc = 0, dab = 0, dac = 0, dbc = 0
    cdef cnp.int64_t t[4]
    cdef bint in_a, in_b, in_c, zero, degenerate
    cdef long long s
    out = np.empty((max(list_cap, 0), 4), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] ov = out
    cdef Py_ssize_t nlisted = 0
    cdef bint overflow = False

    for b in range(nb):
        c = bneg[b]
        for p in range(bstart[b], bstart[b + 1]):
            t[0] = pi[p]
            t[1] = pj[p]
            for q in range(bstart[c], bstart[c + 1]):
                t[2] = pi[q]
                t[3] = pj[q]
                total += 1
                in_a = t[1] == neg[t[0]] and t[3] == neg[t[2]]
                in_b = t[2] == neg[t[0]] and t[3] == neg[t[1]]
                in_c = t[3] == neg[t[0]] and t[2] == neg[t[1]]
                fa += in_a
                fb += in_b
                fc += in_c
                dab += in_a and in_b
                dac += in_a and in_c
                dbc += in_b and in_c
                degenerate = False
                for m in range(1, 15):
                    zero = True
                    for k in range(d):
                        s = 0
                        if m & 1:
                            s += pts[t[0], k]
                        if m & 2:
                            s += pts[t[1], k]
                        if m & 4:
                            s += pts[t[2], k]
                        if m & 8:
                            s += pts[t[3], k]
                        if s != 0:
                            zero = False
                            break
                    if zero:
                        degenerate = True
                        break
                if not degenerate:
                    nondeg += 1
                    if nlisted < list_cap:
                        ov[nlisted, 0] = t[0]
                        ov[nlisted, 1] = t[1]
                        ov[nlisted, 2] = t[2]
                        ov[nlisted, 3] = t[3]
                        nlisted += 1
                    elif list_cap > 0:
                        overflow = True
    return (total, nondeg, (fa, fb, fc), (dab, dac, dbc),
            out[:nlisted], overflow)


def pair_accumulate(const double complex[:, ::1] a, const cnp.int64_t[::1] pi,
                    const cnp.int64_t[::1] pj, const cnp.int64_t[::1] bucket,
                    const double[:, ::1] w, Py_ssize_t nbuckets):
    cdef Py_ssize_t M = a.shape[0], P = pi.shape[0], K = w.shape[1]
    cdef Py_ssize_t r, p, k, b
    cdef double complex prod
    out = np.zeros((M, nbuckets, K), dtype=np.complex128)
    cdef double complex[:, :, ::1] T = out
    with nogil:
        for r in range(M):
            for p in range(P):
                prod = a[r, pi[p]] * a[r, pj[p]]
                b = bucket[p]
                for k in range(K):
                    T[r, b, k] = T[r, b, k] + w[p, k] * prod
    return out


cdef inline double _tet_cut(double a, double b, double c, double d) nogil:
    """Zero-set area of the linear interpolant on one Kuhn tet, in index units.

    ``a -> b -> c -> d`` walks the tet one axis at a time, so the gradient is
    the vector of successive differences.  The area is ``|grad| * dV/dt`` at
    ``t = 0``, where ``V(t)`` is the volume of ``{f > t}``; the expressions
    below only subtract values of opposite sign, so they do not cancel.
    """
    cdef double w[4]
    cdef double p[4]
    cdef double q[4]
    cdef int m, npos = 0, nneg = 0
    cdef double g, num, den
    w[0] = a
    w[1] = b
    w[2] = c
    w[3] = d
    for m in range(4):
        if w[m] > 0:
            p[npos] = w[m]
            npos += 1
        else:
            q[nneg] = w[m]
            nneg += 1
    if npos == 0 or nneg == 0:
        return 0.0
    g = sqrt((b - a) * (b - a) + (c - b) * (c - b) + (d - c) * (d - c))
    if npos == 1:
        num = p[0] * p[0]
        den = (p[0] - q[0]) * (p[0] - q[1]) * (p[0] - q[2])
    elif nneg == 1:
        num = q[0] * q[0]
        den = (p[0] - q[0]) * (p[1] - q[0]) * (p[2] - q[0])
    else:
        num = q[0] * q[1] * (p[0] + p[1]) - p[0] * p[1] * (q[0] + q[1])
        den = (p[0] - q[0]) * (p[0] - q[1]) * (p[1] - q[0]) * (p[1] - q[1])
    return 0.5 * g * num / den


def tet_surface_area(const double[:, :, ::1] f):
    """Zero-level area in index units (multiply by h^2)."""
    cdef Py_ssize_t G0 = f.shape[0], G1 = f.shape[1], G2 = f.shape[2]
    cdef Py_ssize_t i, j, k, c, i1, j1, k1
    cdef double val[8]
    cdef double total = 0.0
    cdef bint anypos, anyneg
    with nogil:
        for i in range(G0):
            i1 = i + 1 if i + 1 < G0 else 0
            for j in range(G1):
                j1 = j + 1 if j + 1 < G1 else 0
                for k in range(G2):
                    k1 = k + 1 if k + 1 < G2 else 0
                    val[0] = f[i, j, k]
                    val[1] = f[i1, j, k]
                    val[2] = f[i, j1, k]
                    val[3] = f[i1, j1, k]
                    val[4] = f[i, j, k1]
                    val[5] = f[i1, j, k1]
                    val[6] = f[i, j1, k1]
                    val[7] = f[i1, j1, k1]
                    anypos = False
                    anyneg = False
                    for c in range(8):
                        if val[c] == 0.0:
                            val[c] = 1e-12
                        if val[c] > 0:
                            anypos = True
                        else:
                            anyneg = True
                    if not (anypos and anyneg):
                        continue
                    # the six tets of KUHN_TETS
                    total += _tet_cut(val[0], val[1], val[3], val[7])
                    total += _tet_cut(val[0], val[1], val[5], val[7])
                    total += _tet_cut(val[0], val[2], val[3], val[7])
                    total += _tet_cut(val[0], val[2], val[6], val[7])
                    total += _tet_cut(val[0], val[4], val[5], val[7])
                    total += _tet_cut(val[0], val[4], val[6], val[7])
    return total


def tri_contour_length(const double[:, ::1] f):
    """Zero-level length in index units (multiply by h)."""
    cdef Py_ssize_t G0 = f.shape[0], G1 = f.shape[1]
    cdef Py_ssize_t i, j, c, t, m, lone, o1, o2
    cdef double val[4]
    cdef double px[4]
    cdef double py[4]
    cdef double total = 0.0, x, s1, s2, ax, ay, bx, by
    cdef int npos
    for c in range(4):
        px[c] = c & 1
        py[c] = (c >> 1) & 1
    with nogil:
        for i in range(G0):
            for j in range(G1):
                for c in range(4):
                    x = f[(i + (c & 1)) % G0, (j + ((c >> 1) & 1)) % G1]
                    if x == 0.0:
                        x = 1e-12
                    val[c] = x
                for t in range(2):
                    npos = 0
                    for m in range(3):
                        if val[KUHN_TRIS[t][m]] > 0:
                            npos += 1
                    if npos == 0 or npos == 3:
                        continue
                    # the vertex alone on its side
                    lone = -1
                    for m in range(3):
                        if (val[KUHN_TRIS[t][m]] > 0) == (npos == 1):
                            lone = m
                    o1 = KUHN_TRIS[t][(lone + 1) % 3]
                    o2 = KUHN_TRIS[t][(lone + 2) % 3]
                    lone = KUHN_TRIS[t][lone]
                    s1 = val[lone] / (val[lone] - val[o1])
                    s2 = val[lone] / (val[lone] - val[o2])
                    ax = px[lone] + s1 * (px[o1] - px[lone])
                    ay = py[lone] + s1 * (py[o1] - py[lone])
                    bx = px[lone] + s2 * (px[o2] - px[lone])
                    by = py[lone] + s2 * (py[o2] - py[lone])
                    total += sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by))
    return total


cdef inline void _sort4(double* v) nogil:
    cdef int i, j
    cdef double x
    for i in range(1, 4):
        x = v[i]
        j = i - 1
        while j >= 0 and v[j] > x:
            v[j + 1] = v[j]
            j -= 1
        v[j + 1] = x


cdef inline double _tet_cdf(double* v, double t) nogil:
    # fraction of a tetrahedron where a linear function is <= t; v sorted
    cdef double a, b, c2, c3, c
    if t < v[0]:
        return 0.0
    if t >= v[3]:
        return 1.0
    if t < v[1]:
        a = t - v[0]
        return a * a * a / ((v[1] - v[0]) * (v[2] - v[0]) * (v[3] - v[0]))
    if t < v[2]:
        a = t - v[0]
        b = t - v[1]
        c2 = v[2] - t
        c3 = v[3] - t
        return ((a * a * b * b + a * b * (a + b) * (c2 + c3) + c2 * c3 * (a * a + a * b + b * b))
                / ((a + c2) * (a + c3) * (b + c2) * (b + c3)))
    c = v[3] - t
    return 1.0 - c * c * c / ((v[3] - v[0]) * (v[3] - v[1]) * (v[3] - v[2]))


cdef inline double _tri_cdf(double* v, double t) nogil:
    cdef double a, c
    if t < v[0]:
        return 0.0
    if t >= v[2]:
        return 1.0
    if t < v[1]:
        a = t - v[0]
        return a * a / ((v[1] - v[0]) * (v[2] - v[0]))
    c = v[2] - t
    return 1.0 - c * c / ((v[2] - v[0]) * (v[2] - v[1]))


cdef inline void _sort3(double* v) nogil:
    cdef double x
    if v[0] > v[1]:
        x = v[0]; v[0] = v[1]; v[1] = x
    if v[1] > v[2]:
        x = v[1]; v[1] = v[2]; v[2] = x
    if v[0] > v[1]:
        x = v[0]; v[0] = v[1]; v[1] = x


def tet_band_integral(const double[:, :, ::1] f, const double[:, :, ::1] g, double eps):
    """Sum over Kuhn tets of (band volume fraction) * (mean g) / 6, index units."""
    cdef Py_ssize_t G0 = f.shape[0], G1 = f.shape[1], G2 = f.shape[2]
    cdef Py_ssize_t i, j, k, c, t, m
    cdef double val[8]
    cdef double gv[8]
    cdef double v[4]
    cdef double total = 0.0, lo, hi, gm
    cdef Py_ssize_t ii, jj, kk
    with nogil:
        for i in range(G0):
            for j in range(G1):
                for k in range(G2):
                    lo = 1e300
                    hi = -1e300
                    for c in range(8):
                        ii = (i + (c & 1)) % G0
                        jj = (j + ((c >> 1) & 1)) % G1
                        kk = (k + ((c >> 2) & 1)) % G2
                        val[c] = f[ii, jj, kk]
                        gv[c] = g[ii, jj, kk]
                        if val[c] < lo:
                            lo = val[c]
                        if val[c] > hi:
                            hi = val[c]
                    if lo > eps or hi < -eps:
                        continue
                    for t in range(6):
                        gm = 0.0
                        for m in range(4):
                            v[m] = val[KUHN_TETS[t][m]]
                            gm += gv[KUHN_TETS[t][m]]
                        _sort4(v)
                        total += (_tet_cdf(v, eps) - _tet_cdf(v, -eps)) * 0.25 * gm / 6.0
    return total


def tri_band_integral(const double[:, ::1] f, const double[:, ::1] g, double eps):
    cdef Py_ssize_t G0 = f.shape[0], G1 = f.shape[1]
    cdef Py_ssize_t i, j, c, t, m, ii, jj
    cdef double val[4]
    cdef double gv[4]
    cdef double v[3]
    cdef double total = 0.0, gm
    with nogil:
        for i in range(G0):
            for j in range(G1):
                for c in range(4):
                    ii = (i + (c & 1)) % G0
                    jj = (j + ((c >> 1) & 1)) % G1
                    val[c] = f[ii, jj]
                    gv[c] = g[ii, jj]
                for t in range(2):
                    gm = 0.0
                    for m in range(3):
                        v[m] = val[KUHN_TRIS[t][m]]
                        gm += gv[KUHN_TRIS[t][m]]
                    _sort3(v)
                    total += (_tri_cdf(v, eps) - _tri_cdf(v, -eps)) * gm / 3.0 / 2.0
    return total


def pair_gram(const double complex[:, ::1] a, const cnp.int64_t[::1] pi,
              const cnp.int64_t[::1] pj, const cnp.int64_t[::1] bstart,
              const cnp.int64_t[::1] bneg, const double[:, ::1] w):
    """``S[m, p, q] = sum_b T_p(b) conj(T_q(b))`` without storing ``T``.

    Buckets ``b`` and ``bneg[b]`` carry conjugate sums, so only one of each
    pair is visited and the result is real.
    """
    cdef Py_ssize_t M = a.shape[0], nb = bstart.shape[0] - 1, K = w.shape[1]
    cdef Py_ssize_t r, b, p, i, j
    cdef double pr, pim, ar, ai, br, bi, f
    cdef double Tr[16]
    cdef double Ti[16]
    if K > 16:
        raise ValueError("at most 16 weights")
    out = np.zeros((M, K, K), dtype=np.float64)
    cdef double[:, :, ::1] S = out
    with nogil:
        for r in range(M):
            for b in range(nb):
                if bneg[b] < b:
                    continue
                f = 1.0 if bneg[b] == b else 2.0
                for i in range(K):
                    Tr[i] = 0
                    Ti[i] = 0
                for p in range(bstart[b], bstart[b + 1]):
                    ar = a[r, pi[p]].real
                    ai = a[r, pi[p]].imag
                    br = a[r, pj[p]].real
                    bi = a[r, pj[p]].imag
                    pr = ar * br - ai * bi
                    pim = ar * bi + ai * br
                    for i in range(K):
                        Tr[i] += w[p, i] * pr
                        Ti[i] += w[p, i] * pim
                for i in range(K):
                    for j in range(i, K):
                        S[r, i, j] += f * (Tr[i] * Tr[j] + Ti[i] * Ti[j])
            for i in range(K):
                for j in range(i):
                    S[r, i, j] = S[r, j, i]
    return out
