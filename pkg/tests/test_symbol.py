import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylstrip.grid import (
    GridFunction,
    GridSpec,
    PhaseGridFunction,
    partial_fourier_inverse,
    quadrature,
)
from weylstrip.ousg import symbol_a_t
from weylstrip.potential import PExponent, PolynomialPotential1D, QuadraticPotential
from weylstrip.symbol import (
    GrowthMap,
    GrowthPair,
    SymbolF2,
    g_of,
    growth_pair_scan,
    hs_norm,
    quadratic_growth_pair,
    r_bound_integral,
    strip_extend,
    validate_growth_pair,
)

X1 = GridSpec.uniform(1, 6.0, 32)
K1 = GridSpec.uniform(1, 30.0, 512)


def exp_k2():
    return SymbolF2(1, hs0=lambda x, k: np.exp(-k[..., 0] ** 2), name="e^{-k^2}")


def test_growth_map_requires_symmetry():
    with pytest.raises(ValueError):
        GrowthMap([[0.0, 1.0], [0.0, 0.0]])
    M = GrowthMap([[1.0, 2.0], [2.0, 3.0]], [1.0, -1.0])
    assert np.allclose(M(np.array([1.0, 1.0])), [4.0, 4.0])


def test_growth_pair_epsilon_nonnegative():
    with pytest.raises(ValueError):
        GrowthPair(GrowthMap.zero(1), -0.1)


def test_g_of_zero_map():
    sym = SymbolF2.gaussian(1.0)
    x, k = np.array([0.3]), np.array([1.2])
    assert np.isclose(g_of(sym, GrowthMap.zero(1), x, k), sym.eval_hs0(x, k) / np.sqrt(2 * np.pi))


def test_g_of_example():
    g = g_of(exp_k2(), GrowthMap([[1.0]]), np.array([1.0]), np.array([1.0]))
    assert np.isclose(g, (2 * np.pi) ** -0.5, rtol=1e-14)


def test_g_of_ou_finite_with_quadratic_map():
    pot = QuadraticPotential([[0.5]])
    gp = quadratic_growth_pair(pot, PExponent(4))
    a = symbol_a_t(pot, 1.0)
    xs = X1.flat_points()[:, None, :]
    ks = K1.flat_points()[None, :, :]
    assert np.all(np.isfinite(g_of(a, gp.M, xs, ks)))


def test_g_of_blow_up():
    with pytest.raises(ValueError, match="g blow-up"):
        g_of(SymbolF2.gaussian(100.0), GrowthMap([[50.0]]), np.array([10.0]), np.array([10.0]))


@pytest.mark.parametrize("s", [0.25, 1.0, 4.0])
def test_hs_norm_gaussian_is_one(s):
    rep = hs_norm(SymbolF2.gaussian(s), GrowthMap.zero(1), X1, K1)
    assert abs(rep.hs0_norm - 1) < 1e-6
    assert rep.b_norm == 0 and rep.total == rep.hs0_norm


def test_hs_norm_identity_and_zero():
    assert hs_norm(SymbolF2.identity(1), GrowthMap.zero(1), X1, K1).total == 1
    rep = hs_norm(SymbolF2.zero(1), GrowthMap.zero(1), X1, K1)
    assert rep.total == 0 and np.all(rep.g_max == 0)


def _corpus():
    pot = QuadraticPotential([[0.5]])
    return [
        SymbolF2.gaussian(0.5),
        symbol_a_t(pot, 0.7),
        SymbolF2.multiplier(lambda x: np.cos(x[..., 0])),
        symbol_a_t(pot, 0.3) + SymbolF2.identity(1),
    ]


def test_hs_norm_subadditive_and_homogeneous():
    M = GrowthMap([[0.25]])
    syms = _corpus()
    for a in syms:
        na = hs_norm(a, M, X1, K1).total
        assert np.isclose(hs_norm((-2.5) * a, M, X1, K1).total, 2.5 * na, rtol=1e-12)
        for b in syms:
            nb = hs_norm(b, M, X1, K1).total
            assert hs_norm(a + b, M, X1, K1).total <= na + nb + 1e-12


def test_g_max_even_in_M():
    M = GrowthMap([[0.25]], [0.1])
    a = symbol_a_t(QuadraticPotential([[0.5]], [0.2]), 0.6)
    assert np.array_equal(hs_norm(a, M, X1, K1).g_max, hs_norm(a, -M, X1, K1).g_max)


def test_strip_extend_example():
    val = strip_extend(exp_k2(), GrowthMap([[0.0]], [1.0]), [0.0], np.zeros((1, 1)), 1.0, K1)
    # (2 pi)^{-1/2} sqrt(pi) e^{1/4}
    assert np.isclose(val[0], np.exp(0.25) / np.sqrt(2), rtol=1e-12)


def test_strip_extend_rejects_large_t():
    with pytest.raises(ValueError):
        strip_extend(exp_k2(), GrowthMap.zero(1), [0.0], np.zeros((1, 1)), 1.5, K1)


def test_strip_extend_t0_is_inverse_transform():
    a = symbol_a_t(QuadraticPotential([[0.5]]), 0.8)
    kspec = GridSpec.uniform(1, 20.0, 256)
    xspec = GridSpec.uniform(1, 2.0, 8)
    F = PhaseGridFunction.from_callable(xspec, kspec, a.eval_hs0, domain="k")
    inv = partial_fourier_inverse(F)
    xis = inv.pspec.points()
    M = GrowthMap([[0.25]])
    for i, x in enumerate(xspec.points()):
        ext = strip_extend(a, M, x, xis, 0.0, kspec)
        assert np.max(np.abs(ext - inv.values[i])) < 1e-10
        assert np.max(np.abs(ext - a.position(x, xis))) < 1e-10


@settings(max_examples=15, deadline=None)
@given(x=st.floats(-3, 3), xi=st.floats(-3, 3), t=st.floats(-1, 1))
def test_strip_extend_bounded_by_hs0_norm(x, xi, t):
    pot = QuadraticPotential([[0.5]])
    M = quadratic_growth_pair(pot, PExponent(4)).M
    a = symbol_a_t(pot, 0.9)
    bound = hs_norm(a, M, GridSpec.uniform(1, 4.0, 64), K1).hs0_norm
    val = strip_extend(a, M, [x], np.array([[xi]]), t, K1)
    assert abs(val[0]) <= bound + 1e-6


def test_quadratic_growth_pair_examples():
    assert np.all(quadratic_growth_pair(QuadraticPotential([[0.5]]), PExponent(2)).M.Mtilde == 0)
    gp = quadratic_growth_pair(QuadraticPotential([[0.5]]), PExponent(4))
    assert np.isclose(gp.M(np.array([2.0]))[0], 0.5) and gp.epsilon == 0
    pot = QuadraticPotential(0.5 * np.eye(2), [1.0, 0.0], c=np.sqrt(2))
    gp = quadratic_growth_pair(pot, PExponent(4))
    assert np.allclose(gp.M(np.zeros(2)), [0.5 * np.sqrt(2) / 2, 0.0])
    spec = GridSpec.uniform(2, 3.0, 16)
    assert validate_growth_pair(pot, PExponent(4), gp, spec) < 1e-10


def test_validate_p2_zero_map_exact():
    pot = PolynomialPotential1D([0.0, 0.0, 0.5, 0.1], sines=[[1.0, 2.0]])
    gp = GrowthPair(GrowthMap.zero(1))
    assert validate_growth_pair(pot, PExponent(2), gp, GridSpec.uniform(1, 3.0, 32)) == 0.0


def test_validate_bounded_perturbation():
    pot = PolynomialPotential1D([0.0, 0.0, 0.5], sines=[[1.0, 1.0]])
    quad = QuadraticPotential([[0.5]])
    gp = quadratic_growth_pair(quad, PExponent(4))
    eps = validate_growth_pair(pot, PExponent(4), gp, GridSpec.uniform(1, 6.0, 64))
    assert 0 < eps <= 0.5


def test_validate_callable_map_matches_affine():
    pot = QuadraticPotential([[0.7]], [0.3], c=1.2)
    gp = quadratic_growth_pair(pot, PExponent(3))
    spec = GridSpec.uniform(1, 3.0, 16)
    perturbed = GrowthPair(lambda x: gp.M(x) + 0.1)
    affine = GrowthPair(GrowthMap(gp.M.Mtilde, gp.M.ell + 0.1))
    a = growth_pair_scan(pot, PExponent(3), perturbed, spec)
    b = growth_pair_scan(pot, PExponent(3), affine, spec)
    assert np.isclose(a[0], b[0], rtol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_validate_random_quadratics(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 3))
    A = rng.normal(size=(d, d))
    pot = QuadraticPotential(A @ A.T + 0.1 * np.eye(d), rng.normal(size=d), rng.uniform(0.5, 2))
    p = PExponent(rng.choice([4 / 3, 2.0, 3.0, 4.0, 8.0]))
    spec = GridSpec.uniform(d, 2.0, 8 if d == 2 else 32)
    assert validate_growth_pair(pot, p, quadratic_growth_pair(pot, p), spec) < 1e-10


def test_r_bound_monotone_gaussian():
    spec = GridSpec.uniform(1, 8.0, 256)
    G = GridFunction.from_callable(spec, lambda k: np.exp(-k[..., 0] ** 2))
    val = r_bound_integral(G)
    assert np.isclose(val, np.sqrt(np.pi), rtol=1e-10)
    assert np.isclose(val, quadrature(G).real, rtol=1e-14)


def test_r_bound_bump_exceeds_quadrature():
    spec = GridSpec.uniform(1, 8.0, 256)
    G = GridFunction.from_callable(
        spec, lambda k: 0.5 * np.exp(-k[..., 0] ** 2) + 2 * np.exp(-8 * (np.abs(k[..., 0]) - 2) ** 2)
    )
    assert r_bound_integral(G) > quadrature(G).real


def test_r_bound_rejects_negative():
    spec = GridSpec.uniform(1, 1.0, 8)
    with pytest.raises(ValueError):
        r_bound_integral(GridFunction(spec, -np.ones(8)))


def test_sampled_symbol_interpolates_and_raises():
    xs, ks = GridSpec.uniform(1, 2.0, 16), GridSpec.uniform(1, 4.0, 32)
    F = PhaseGridFunction.from_callable(xs, ks, lambda x, k: x[..., 0] + 2j * k[..., 0], domain="k")
    sym = SymbolF2.from_samples(F)
    assert np.isclose(sym.eval_hs0(np.array([0.3]), np.array([-1.1])), 0.3 - 2.2j)
    with pytest.raises(ValueError, match="out of range"):
        sym.eval_hs0(np.array([5.0]), np.array([0.0]))
    zero = SymbolF2.from_samples(F, outside="zero")
    assert zero.eval_hs0(np.array([5.0]), np.array([0.0])) == 0
