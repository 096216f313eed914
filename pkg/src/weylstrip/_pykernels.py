"""Pure numpy implementations of the hot loops.

Same signatures as the compiled ``_ckernels`` module; selected by
:mod:`weylstrip._backend` when the extension is unavailable.
"""

import numpy as np

SNAP = 1e-9


def interp_multilinear(origin, step, values, points, zero_outside):
    """Multilinear interpolation of ``values`` sampled on a regular grid.

    Parameters
    ----------
    origin, step : (nd,) float arrays
    values : complex array with ``nd`` axes
    points : (m, nd) float array
    zero_outside : bool
        Points outside the node hull evaluate to 0 when true.

    Returns
    -------
    out : (m,) complex array
    first_bad : int
        Index of the first out-of-range point, -1 if none.
    """
    values = np.ascontiguousarray(values, dtype=complex)
    points = np.asarray(points, dtype=float)
    nd = values.ndim
    m = points.shape[0]
    shape = np.array(values.shape)
    t = (points - origin) / step
    r = np.rint(t)
    t = np.where(np.abs(t - r) < SNAP, r, t)
    inside = np.all((t >= 0) & (t <= shape - 1), axis=1)
    bad = np.flatnonzero(~inside)
    first_bad = int(bad[0]) if bad.size else -1
    t = np.where(inside[:, None], t, 0.0)
    idx = np.minimum(np.floor(t).astype(np.int64), shape - 2)
    frac = t - idx
    flat = values.reshape(-1)
    strides = np.array([int(np.prod(values.shape[i + 1:])) for i in range(nd)], dtype=np.int64)
    out = np.zeros(m, dtype=complex)
    for corner in range(1 << nd):
        w = np.ones(m)
        off = np.zeros(m, dtype=np.int64)
        for a in range(nd):
            if corner >> a & 1:
                w = w * frac[:, a]
                off += (idx[:, a] + 1) * strides[a]
            else:
                w = w * (1.0 - frac[:, a])
                off += idx[:, a] * strides[a]
        out += w * flat[off]
    out[~inside] = 0.0
    return out, first_bad


def moyal00_sampled(origin1, step1, values1, origin2, step2, values2, xs, ks, vs, weight):
    """Twisted convolution of two sampled F2-symbols.

    ``out[i, j] = weight * sum_v F1(x_i + (v - k_j)/2, v) F2(x_i + v/2, k_j - v)``
    with both tables extended by zero outside their node hull.
    """
    xs = np.asarray(xs, dtype=float)
    ks = np.asarray(ks, dtype=float)
    vs = np.asarray(vs, dtype=float)
    out = np.empty((xs.shape[0], ks.shape[0]), dtype=complex)
    kk = ks[:, None, :]
    vv = vs[None, :, :]
    shape = (ks.shape[0], vs.shape[0])
    for i, x in enumerate(xs):
        p1 = np.concatenate(np.broadcast_arrays(x + (vv - kk) / 2, vv), axis=-1)
        p2 = np.concatenate(np.broadcast_arrays(x + vv / 2, kk - vv), axis=-1)
        f1, _ = interp_multilinear(origin1, step1, values1, p1.reshape(-1, p1.shape[-1]), True)
        f2, _ = interp_multilinear(origin2, step2, values2, p2.reshape(-1, p2.shape[-1]), True)
        out[i] = weight * np.sum((f1 * f2).reshape(shape), axis=1)
    return out


def growth_pair_scan(points, phi, Mtilde, ell, c, coef):
    """Max over point pairs of ``|coef |phi_i - phi_j| - |(x_i - x_j)/c . M((x_i + x_j)/2c)||``.

    Returns ``(eps_hat, i, j)``.
    """
    points = np.asarray(points, dtype=float)
    phi = np.asarray(phi, dtype=float)
    best, bi, bj = 0.0, 0, 0
    for i in range(points.shape[0]):
        diff = (points[i] - points) / c
        mid = (points[i] + points) / (2.0 * c)
        M = mid @ Mtilde.T + ell
        val = np.abs(coef * np.abs(phi[i] - phi) - np.abs(np.sum(diff * M, axis=1)))
        j = int(np.argmax(val))
        if val[j] > best:
            best, bi, bj = float(val[j]), i, j
    return best, bi, bj
