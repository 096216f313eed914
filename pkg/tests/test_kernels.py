"""The compiled kernels and the numpy fallback must agree."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylstrip import _pykernels as py

ck = pytest.importorskip("weylstrip._ckernels")


def _table(rng, nd, n=9):
    shape = (n,) * nd
    origin = rng.uniform(-2, 0, nd)
    step = rng.uniform(0.1, 0.5, nd)
    values = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return origin, step, values


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), nd=st.integers(1, 4))
def test_interp_parity(seed, nd):
    rng = np.random.default_rng(seed)
    origin, step, values = _table(rng, nd, 6)
    hi = origin + 5 * step
    pts = rng.uniform(origin - step, hi + step, size=(50, nd))
    a, ba = py.interp_multilinear(origin, step, values, pts, True)
    b, bb = ck.interp_multilinear(origin, step, values, pts, True)
    assert ba == bb
    assert np.allclose(a, b, rtol=1e-13, atol=1e-13)


def test_interp_reproduces_nodes_and_linear_functions():
    rng = np.random.default_rng(0)
    origin, step = np.array([-1.0, 0.0]), np.array([0.25, 0.5])
    g = [origin[i] + step[i] * np.arange(9) for i in range(2)]
    X, Y = np.meshgrid(*g, indexing="ij")
    vals = 2 * X - 3 * Y + 1j * X
    pts = rng.uniform([-1, 0], [1, 4], size=(40, 2))
    for mod in (py, ck):
        out, bad = mod.interp_multilinear(origin, step, vals, pts, True)
        assert bad == -1
        assert np.allclose(out, 2 * pts[:, 0] - 3 * pts[:, 1] + 1j * pts[:, 0], atol=1e-13)
        nodes = np.stack([X.ravel(), Y.ravel()], axis=1)
        out, _ = mod.interp_multilinear(origin, step, vals, nodes, True)
        assert np.array_equal(out, vals.ravel())


def test_interp_out_of_range_reports_first_index():
    origin, step = np.array([0.0]), np.array([1.0])
    vals = np.arange(5, dtype=complex)
    pts = np.array([[1.5], [7.0], [-3.0]])
    for mod in (py, ck):
        out, bad = mod.interp_multilinear(origin, step, vals, pts, True)
        assert bad == 1
        assert out[1] == 0 and out[2] == 0 and out[0] == 1.5


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 2))
def test_moyal_sampled_parity(seed, d):
    rng = np.random.default_rng(seed)
    n = 6
    t1 = _table(rng, 2 * d, n)
    t2 = _table(rng, 2 * d, n)
    xs = rng.uniform(-1.5, 0.5, size=(4, d))
    ks = rng.uniform(-1.5, 0.5, size=(5, d))
    vs = rng.uniform(-1.5, 0.5, size=(7, d))
    a = py.moyal00_sampled(*t1, *t2, xs, ks, vs, 0.3)
    b = ck.moyal00_sampled(*t1, *t2, xs, ks, vs, 0.3)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 2))
def test_growth_scan_parity(seed, d):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(30, d))
    phi = rng.normal(size=30)
    A = rng.normal(size=(d, d))
    Mt = A + A.T
    ell = rng.normal(size=d)
    a = py.growth_pair_scan(pts, phi, Mt, ell, 1.3, 0.25)
    b = ck.growth_pair_scan(pts, phi, Mt, ell, 1.3, 0.25)
    assert np.isclose(a[0], b[0], rtol=1e-12)
    assert a[1:] == b[1:]


def test_backend_selection_env(monkeypatch):
    import importlib

    import weylstrip._backend as backend

    monkeypatch.setenv("WEYLSTRIP_BACKEND", "python")
    try:
        assert importlib.reload(backend).NAME == "python"
    finally:
        monkeypatch.delenv("WEYLSTRIP_BACKEND")
        importlib.reload(backend)
    assert backend.NAME == "cython"
