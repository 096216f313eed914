import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylstrip.grid import GridFunction, GridSpec, interior_mask, quadrature
from weylstrip.potential import (
    PExponent,
    PolynomialPotential1D,
    Potential,
    QuadraticPotential,
    c_phi,
    hermite,
    ou_apply,
    thm_h_residual,
    u_p_forward,
    u_p_inverse,
)

HALF = QuadraticPotential([[0.5]])


def flat(d=1, c=1.0):
    return Potential(
        lambda x: np.zeros(x.shape[:-1]),
        lambda x: np.zeros(x.shape),
        lambda x: np.zeros(x.shape[:-1]),
        d=d,
        c=c,
    )


def test_pexponent_constants():
    assert PExponent(2).M == 0 and PExponent(2).theta == 0
    assert np.isclose(PExponent(4).M, 0.5)
    assert np.isclose(PExponent(4).theta, np.pi / 6)
    inf = PExponent.parse("inf")
    assert inf.inv == 0 and inf.M == 1 and np.isclose(inf.theta, np.pi / 2)
    assert np.isclose(PExponent(4 / 3).M, 0.5)
    with pytest.raises(ValueError):
        PExponent(0.5)


def test_quadratic_validation():
    with pytest.raises(ValueError):
        QuadraticPotential([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        QuadraticPotential([[-1.0]])
    with pytest.raises(ValueError):
        QuadraticPotential([[1.0]], c=0.0)


def test_c_phi_examples():
    assert np.isclose(c_phi(HALF, np.array([2.0])), 0.5)
    x = np.linspace(-3, 3, 7)[:, None]
    assert np.all(c_phi(flat(), x) == 0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_c_phi_quadratic_closed_form(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(2, 2))
    N = A @ A.T
    l = rng.normal(size=2)
    c = rng.uniform(0.5, 2.0)
    pot = QuadraticPotential(N, l, c)
    x = rng.normal(size=(5, 2))
    cx = c * x
    ref = np.sum((cx @ N + l / 2) ** 2, axis=-1) - np.trace(N)
    assert np.allclose(c_phi(pot, x), ref, rtol=1e-12, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_gradient_and_laplacian_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(2, 2))
    pot = QuadraticPotential(A @ A.T, rng.normal(size=2))
    x = rng.normal(size=2)
    h = 1e-4
    g = np.array([(pot.value(x + h * e) - pot.value(x - h * e)) / (2 * h) for e in np.eye(2)])
    lap = sum((pot.value(x + h * e) - 2 * pot.value(x) + pot.value(x - h * e)) / h**2 for e in np.eye(2))
    assert np.allclose(g, pot.gradient(x), atol=1e-6)
    assert np.isclose(lap, pot.laplacian(x), atol=1e-4)


def test_custom_1d_derivatives():
    pot = PolynomialPotential1D([0.0, 0.2, 0.5], sines=[[1.0, 1.0]])
    x = np.array([[0.3], [1.7]])
    t = x[:, 0]
    assert np.allclose(pot.value(x), 0.2 * t + 0.5 * t**2 + np.sin(t))
    assert np.allclose(pot.gradient(x)[:, 0], 0.2 + t + np.cos(t))
    assert np.allclose(pot.laplacian(x), 1.0 - np.sin(t))


def _interior_err(spec, got, ref, margin=0.1):
    m = interior_mask(spec, margin)
    return np.max(np.abs(got - ref)[m])


def test_ou_apply_constant():
    spec = GridSpec.uniform(1, 5.0, 64)
    f = GridFunction(spec, np.ones(64))
    assert _interior_err(spec, ou_apply(HALF, f).values, 0.0) < 1e-12


@pytest.mark.parametrize("n", [1, 2])
def test_ou_apply_low_hermite_exact(n):
    # central differences are exact on quadratics
    spec = GridSpec.uniform(1, 5.0, 64)
    x = spec.axes[0]
    got = ou_apply(HALF, GridFunction(spec, hermite(n, x))).values
    assert _interior_err(spec, got, n * hermite(n, x)) < 1e-10


def test_ou_apply_order_two():
    errs = []
    for npts in (128, 256):
        spec = GridSpec.uniform(1, 5.0, npts)
        x = spec.axes[0]
        f = GridFunction(spec, hermite(4, x))
        errs.append(_interior_err(spec, ou_apply(HALF, f).values, 4 * hermite(4, x)))
    assert 3.5 < errs[0] / errs[1] < 4.5


@pytest.mark.parametrize("n", range(5))
def test_ou_apply_hermite_eigen(n):
    spec = GridSpec.uniform(1, 5.0, 512)
    x = spec.axes[0]
    got = ou_apply(HALF, GridFunction(spec, hermite(n, x))).values
    m = interior_mask(spec, 0.1)
    if n == 0:
        assert np.max(np.abs(got[m])) < 1e-10
    else:
        rel = np.max(np.abs(got - n * hermite(n, x))[m]) / np.max(np.abs(n * hermite(n, x))[m])
        assert rel < 5 * spec.h[0] ** 2


def test_u_p_examples():
    spec = GridSpec.uniform(1, 5.0, 32)
    x = spec.axes[0]
    one = GridFunction(spec, np.ones(32))
    assert np.allclose(u_p_forward(HALF, PExponent(2), one).values, np.exp(-x**2 / 4), rtol=1e-15)
    assert np.array_equal(u_p_forward(HALF, PExponent.parse("inf"), one).values, one.values)
    f = GridFunction(spec, np.sin(x) + 1j)
    back = u_p_inverse(HALF, PExponent(3), u_p_forward(HALF, PExponent(3), f))
    assert np.max(np.abs(back.values - f.values)) < 1e-13


def test_u_p_overflow():
    spec = GridSpec.uniform(1, 100.0, 32)
    with pytest.raises(ValueError, match="weight overflow"):
        u_p_inverse(HALF, PExponent(2), GridFunction(spec, np.ones(32)))


def test_u_p_isometry_summands():
    spec = GridSpec.uniform(1, 5.0, 64)
    x = spec.axes[0]
    f = GridFunction(spec, np.cos(x) + 0.5)
    for p in (1.5, 2.0, 4.0):
        P = PExponent(p)
        lhs = quadrature(GridFunction(spec, np.abs(u_p_forward(HALF, P, f).values) ** p))
        rhs = quadrature(GridFunction(spec, np.abs(f.values) ** p * np.exp(-HALF.value(spec.points()))))
        assert np.isclose(lhs, rhs, rtol=1e-14)


def _bump(spec):
    x = spec.axes[0]
    return GridFunction(spec, np.exp(-2 * x**2))


def test_thm_h_residual_flat_is_exact():
    spec = GridSpec.uniform(1, 6.0, 128)
    assert thm_h_residual(flat(), _bump(spec)) < 1e-12


@pytest.mark.parametrize("c", [1.0, np.sqrt(2)])
def test_thm_h_residual_second_order(c):
    pot = QuadraticPotential([[0.5]], c=c)
    r1 = thm_h_residual(pot, _bump(GridSpec.uniform(1, 6.0, 128)))
    r2 = thm_h_residual(pot, _bump(GridSpec.uniform(1, 6.0, 256)))
    assert 3.5 < r1 / r2 < 4.5


def test_hermite_values():
    assert hermite(2, 2.0) == 3.0
    assert np.all(hermite(0, np.linspace(-1, 1, 5)) == 1)
    assert hermite(3, 1.0) == -2.0
    with pytest.raises(ValueError):
        hermite(-1, 0.0)
