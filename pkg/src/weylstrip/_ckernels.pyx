# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in :mod:`weylstrip._pykernels`."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs, rint

cnp.import_array()

cdef enum:
    MAXND = 4
cdef double SNAP = 1e-9


cdef inline int _locate(double p, double o, double s, Py_ssize_t n,
                        Py_ssize_t* idx, double* frac) noexcept nogil:
    cdef double t = (p - o) / s
    cdef double r = rint(t)
    cdef Py_ssize_t i
    if fabs(t - r) < SNAP:
        t = r
    if t < 0.0 or t > n - 1:
        return 0
    i = <Py_ssize_t>floor(t)
    if i > n - 2:
        i = n - 2
    idx[0] = i
    frac[0] = t - i
    return 1


cdef inline double complex _interp(const double* origin, const double* step,
                                   const Py_ssize_t* shape, const Py_ssize_t* strides,
                                   const double complex* vals, int nd,
                                   const double* p, int* ok) noexcept nogil:
    cdef Py_ssize_t idx[MAXND]
    cdef double frac[MAXND]
    cdef int a, corner
    cdef double w
    cdef Py_ssize_t off
    cdef double complex acc = 0
    for a in range(nd):
        if not _locate(p[a], origin[a], step[a], shape[a], &idx[a], &frac[a]):
            ok[0] = 0
            return 0
    ok[0] = 1
    for corner in range(1 << nd):
        w = 1.0
        off = 0
        for a in range(nd):
            if (corner >> a) & 1:
                w *= frac[a]
                off += (idx[a] + 1) * strides[a]
            else:
                w *= 1.0 - frac[a]
                off += idx[a] * strides[a]
        acc = acc + w * vals[off]
    return acc


cdef int _table(object origin, object step, object values,
                double* o, double* s, Py_ssize_t* shape, Py_ssize_t* strides) except -1:
    cdef int nd = values.ndim
    cdef int a
    if nd > MAXND:
        raise ValueError(f"at most {MAXND} axes supported")
    for a in range(nd):
        o[a] = origin[a]
        s[a] = step[a]
        shape[a] = values.shape[a]
    strides[nd - 1] = 1
    for a in range(nd - 2, -1, -1):
        strides[a] = strides[a + 1] * shape[a + 1]
    return nd


def interp_multilinear(origin, step, values, points, bint zero_outside):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] flat
    cdef double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef double o[MAXND]
    cdef double s[MAXND]
    cdef Py_ssize_t shape[MAXND]
    cdef Py_ssize_t strides[MAXND]
    values = np.ascontiguousarray(values, dtype=np.complex128)
    cdef int nd = _table(origin, step, values, o, s, shape, strides)
    flat = values.reshape(-1)
    cdef Py_ssize_t m = pts.shape[0], i
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(m, dtype=np.complex128)
    cdef Py_ssize_t first_bad = -1
    cdef int ok
    cdef double complex val
    with nogil:
        for i in range(m):
            val = _interp(o, s, shape, strides, &flat[0], nd, &pts[i, 0], &ok)
            if ok:
                out[i] = val
            elif first_bad < 0:
                first_bad = i
    return out, first_bad


def moyal00_sampled(origin1, step1, values1, origin2, step2, values2, xs, ks, vs, double weight):
    cdef double o1[MAXND]
    cdef double s1[MAXND]
    cdef Py_ssize_t sh1[MAXND]
    cdef Py_ssize_t st1[MAXND]
    cdef double o2[MAXND]
    cdef double s2[MAXND]
    cdef Py_ssize_t sh2[MAXND]
    cdef Py_ssize_t st2[MAXND]
    values1 = np.ascontiguousarray(values1, dtype=np.complex128)
    values2 = np.ascontiguousarray(values2, dtype=np.complex128)
    cdef int nd1 = _table(origin1, step1, values1, o1, s1, sh1, st1)
    cdef int nd2 = _table(origin2, step2, values2, o2, s2, sh2, st2)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] f1 = values1.reshape(-1)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] f2 = values2.reshape(-1)
    cdef double[:, ::1] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[:, ::1] K = np.ascontiguousarray(ks, dtype=np.float64)
    cdef double[:, ::1] V = np.ascontiguousarray(vs, dtype=np.float64)
    cdef int d = X.shape[1]
    if nd1 != 2 * d or nd2 != 2 * d:
        raise ValueError("tables must have 2d axes")
    cdef Py_ssize_t nx = X.shape[0], nk = K.shape[0], nv = V.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.zeros((nx, nk), dtype=np.complex128)
    cdef Py_ssize_t i, j, q
    cdef int a, ok1, ok2
    cdef double p1[MAXND]
    cdef double p2[MAXND]
    cdef double complex acc, g1, g2
    with nogil:
        for i in range(nx):
            for j in range(nk):
                acc = 0
                for q in range(nv):
                    for a in range(d):
                        p1[a] = X[i, a] + 0.5 * (V[q, a] - K[j, a])
                        p1[d + a] = V[q, a]
                        p2[a] = X[i, a] + 0.5 * V[q, a]
                        p2[d + a] = K[j, a] - V[q, a]
                    g1 = _interp(o1, s1, sh1, st1, &f1[0], nd1, p1, &ok1)
                    if not ok1:
                        continue
                    g2 = _interp(o2, s2, sh2, st2, &f2[0], nd2, p2, &ok2)
                    if not ok2:
                        continue
                    acc = acc + g1 * g2
                out[i, j] = weight * acc
    return out


def growth_pair_scan(points, phi, Mtilde, ell, double c, double coef):
    cdef double[:, ::1] P = np.ascontiguousarray(points, dtype=np.float64)
    cdef double[::1] F = np.ascontiguousarray(phi, dtype=np.float64)
    cdef double[:, ::1] Mt = np.ascontiguousarray(Mtilde, dtype=np.float64)
    cdef double[::1] l = np.ascontiguousarray(ell, dtype=np.float64)
    cdef Py_ssize_t n = P.shape[0], i, j, bi = 0, bj = 0
    cdef int d = P.shape[1], a, b
    cdef double best = 0.0, dot, mid, val
    with nogil:
        for i in range(n):
            for j in range(n):
                dot = 0.0
                for a in range(d):
                    mid = l[a]
                    for b in range(d):
                        mid = mid + Mt[a, b] * (P[i, b] + P[j, b]) / (2.0 * c)
                    dot = dot + (P[i, a] - P[j, a]) / c * mid
                val = fabs(coef * fabs(F[i] - F[j]) - fabs(dot))
                if val > best:
                    best = val
                    bi = i
                    bj = j
    return best, bi, bj
