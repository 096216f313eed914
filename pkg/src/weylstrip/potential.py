"""Potentials, the drift Laplacian and the ground-state transforms.

A potential ``phi`` defines the weight ``exp(-phi(x)) dx``.  Points are
arrays of shape ``(..., d)``; evaluators broadcast over the leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, interior_mask

__all__ = [
    "Potential",
    "QuadraticPotential",
    "PolynomialPotential1D",
    "PExponent",
    "EXP_CAP",
    "c_phi",
    "ou_apply",
    "u_p_forward",
    "u_p_inverse",
    "thm_h_residual",
    "hermite",
]

#: Largest exponent (natural log scale) the engine will exponentiate.
EXP_CAP = 700.0


class Potential:
    """A C^2 potential given by closed-form value, gradient and Laplacian.

    Parameters
    ----------
    value, gradient, laplacian : callable
        ``x -> phi(x)`` (shape ``...``), ``x -> grad phi(x)`` (shape
        ``(..., d)``) and ``x -> lap phi(x)`` (shape ``...``).
    d : int
        Dimension.
    c : float
        Scaling of the position/momentum pair, ``c > 0``.
    """

    def __init__(self, value, gradient, laplacian, d: int, c: float = 1.0, name: str = ""):
        if not c > 0:
            raise ValueError(f"scaling c must be positive, got {c}")
        self._value = value
        self._gradient = gradient
        self._laplacian = laplacian
        self.d = int(d)
        self.c = float(c)
        self.name = name

    def value(self, x):
        return np.asarray(self._value(np.asarray(x, dtype=float)), dtype=float)

    def gradient(self, x):
        return np.asarray(self._gradient(np.asarray(x, dtype=float)), dtype=float)

    def laplacian(self, x):
        return np.asarray(self._laplacian(np.asarray(x, dtype=float)), dtype=float)

    __call__ = value

    def __repr__(self):
        return f"{type(self).__name__}({self.name or '...'}, d={self.d}, c={self.c})"


class QuadraticPotential(Potential):
    """``phi(x) = x.N x + l.x`` with ``N`` real symmetric positive semidefinite."""

    def __init__(self, N, l=None, c: float = 1.0):
        N = np.atleast_2d(np.asarray(N, dtype=float))
        d = N.shape[0]
        if N.shape != (d, d):
            raise ValueError(f"N must be square, got shape {N.shape}")
        if not np.allclose(N, N.T, rtol=0, atol=1e-12 * max(1.0, np.abs(N).max())):
            raise ValueError("N must be symmetric")
        N = 0.5 * (N + N.T)
        if np.linalg.eigvalsh(N).min() < -1e-12 * max(1.0, np.abs(N).max()):
            raise ValueError("N must be positive semidefinite")
        l = np.zeros(d) if l is None else np.asarray(l, dtype=float).reshape(d)
        self.N = N
        self.l = l
        super().__init__(self._phi, self._grad, self._lap, d=d, c=c, name="quadratic")

    def _phi(self, x):
        return np.einsum("...i,ij,...j->...", x, self.N, x) + x @ self.l

    def _grad(self, x):
        return 2.0 * x @ self.N + self.l

    def _lap(self, x):
        return np.full(x.shape[:-1], 2.0 * np.trace(self.N))

    def __repr__(self):
        return f"QuadraticPotential(N={self.N.tolist()}, l={self.l.tolist()}, c={self.c})"


class PolynomialPotential1D(Potential):
    """One-dimensional ``phi(x) = sum_k a_k x^k + sum_j A_j sin(w_j x)``.

    The sine terms give bounded C^2 perturbations of a polynomial.
    """

    def __init__(self, coefficients, sines=(), c: float = 1.0):
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.sines = [(float(a), float(w)) for a, w in sines]
        poly = np.polynomial.Polynomial(self.coefficients)
        self._poly = (poly, poly.deriv(1), poly.deriv(2))
        super().__init__(self._phi, self._grad, self._lap, d=1, c=c, name="custom-1d")

    def _phi(self, x):
        t = x[..., 0]
        return self._poly[0](t) + sum(a * np.sin(w * t) for a, w in self.sines)

    def _grad(self, x):
        t = x[..., 0]
        g = self._poly[1](t) + sum(a * w * np.cos(w * t) for a, w in self.sines)
        return np.asarray(g)[..., None]

    def _lap(self, x):
        t = x[..., 0]
        return self._poly[2](t) - sum(a * w * w * np.sin(w * t) for a, w in self.sines)


@dataclass(frozen=True)
class PExponent:
    """Integrability exponent ``p`` in ``[1, inf]`` with ``M_p = |1 - 2/p|``."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not (p >= 1.0):
            raise ValueError(f"p must lie in [1, inf], got {self.p}")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, value) -> "PExponent":
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
            return cls(np.inf)
        return cls(float(value))

    @property
    def inv(self) -> float:
        """``1/p``, exactly 0 for ``p = inf``."""
        return 0.0 if np.isinf(self.p) else 1.0 / self.p

    @property
    def M(self) -> float:
        return abs(1.0 - 2.0 * self.inv)

    @property
    def theta(self) -> float:
        return float(np.arcsin(self.M))

    @property
    def kernel_weight(self) -> float:
        """Coefficient ``1/2 - 1/p`` of ``phi(y) - phi(x)`` in the conjugated kernel."""
        return 0.5 - self.inv


def c_phi(pot: Potential, x) -> np.ndarray:
    """``|grad phi(cx)|^2 / 4 - lap phi(cx) / 2``."""
    cx = pot.c * np.asarray(x, dtype=float)
    g = pot.gradient(cx)
    return 0.25 * np.sum(g * g, axis=-1) - 0.5 * pot.laplacian(cx)


def _diff(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    # central differences, second-order one-sided at the two boundary layers
    return np.gradient(values, h, axis=axis, edge_order=2)


def _check_resolution(f: GridFunction) -> None:
    if min(f.spec.n) < 8:
        raise ValueError("grid too coarse: need n >= 8")


def ou_apply(pot: Potential, f: GridFunction) -> GridFunction:
    """Finite-difference ``-lap f + grad phi . grad f``.

    The Laplacian is the composition of the central first-difference
    operator with itself, the same stencil used for the momentum operators
    in :func:`thm_h_residual`.
    """
    _check_resolution(f)
    spec = f.spec
    grad_phi = pot.gradient(spec.points())
    out = np.zeros(spec.shape, dtype=complex)
    for i, h in enumerate(spec.h):
        df = _diff(f.values, h, i)
        out += -_diff(df, h, i) + grad_phi[..., i] * df
    return GridFunction(spec, out)


def _weight_exponent(pot: Potential, p: PExponent, f: GridFunction, sign: float) -> np.ndarray:
    expo = sign * p.inv * pot.value(f.spec.points())
    if np.max(np.abs(expo), initial=0.0) > EXP_CAP:
        raise ValueError("weight overflow")
    return expo


def u_p_forward(pot: Potential, p: PExponent, f: GridFunction) -> GridFunction:
    """Ground-state transform ``f -> f * exp(-phi/p)`` (weighted to flat side)."""
    return f.with_values(f.values * np.exp(_weight_exponent(pot, p, f, -1.0)))


def u_p_inverse(pot: Potential, p: PExponent, f: GridFunction) -> GridFunction:
    return f.with_values(f.values * np.exp(_weight_exponent(pot, p, f, +1.0)))


def thm_h_residual(pot: Potential, f: GridFunction, margin: float = 0.1) -> float:
    """Interior max of ``|L f - C_phi(x/c) f - P^2 f / c^2|``.

    ``P_i = -i c (d_i - d_i phi / 2)`` is discretised with central
    differences and applied twice.
    """
    _check_resolution(f)
    spec = f.spec
    c = pot.c
    x = spec.points()
    grad_phi = pot.gradient(x)
    Lf = ou_apply(pot, f).values
    rhs = c_phi(pot, x / c) * f.values
    for i, h in enumerate(spec.h):

        def P(g):
            return -1j * c * (_diff(g, h, i) - 0.5 * grad_phi[..., i] * g)

        rhs = rhs + P(P(f.values)) / c**2
    mask = interior_mask(spec, margin)
    return float(np.max(np.abs(Lf - rhs)[mask]))


def hermite(n: int, x):
    """Probabilists' Hermite polynomial ``He_n`` by three-term recurrence."""
    if n < 0:
        raise ValueError("Hermite degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), x.copy()
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, x * cur - k * prev
    return cur
