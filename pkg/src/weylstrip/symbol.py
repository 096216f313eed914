"""Holomorphic-strip symbols in their partial-Fourier representation.

A symbol ``a = a0 + ab`` is stored as two separate pieces:

* the ``HS0`` part through its partial transform ``F2 a0(x, k)``, either in
  closed form or as samples with multilinear interpolation;
* the multiplier part ``ab(x)``, a bounded function of position only.

Evaluators take points of shape ``(..., d)`` and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _backend
from .grid import GridFunction, GridSpec, PhaseGridFunction
from .potential import EXP_CAP, PExponent, Potential, QuadraticPotential

__all__ = [
    "GrowthMap",
    "GrowthPair",
    "SymbolF2",
    "SampledF2",
    "HSNormReport",
    "g_of",
    "hs_norm",
    "strip_extend",
    "quadratic_growth_pair",
    "validate_growth_pair",
    "growth_pair_scan",
    "r_bound_integral",
]

_CHUNK = 1 << 20


class GrowthMap:
    """Affine map ``M(x) = Mtilde x + ell`` with symmetric ``Mtilde``."""

    def __init__(self, Mtilde, ell=None):
        Mt = np.atleast_2d(np.asarray(Mtilde, dtype=float))
        d = Mt.shape[0]
        if Mt.shape != (d, d):
            raise ValueError(f"Mtilde must be square, got shape {Mt.shape}")
        if not np.allclose(Mt, Mt.T, rtol=0, atol=1e-12 * max(1.0, np.abs(Mt).max())):
            raise ValueError("Mtilde must be symmetric")
        self.Mtilde = 0.5 * (Mt + Mt.T)
        self.ell = np.zeros(d) if ell is None else np.asarray(ell, dtype=float).reshape(d)

    @classmethod
    def zero(cls, d: int) -> "GrowthMap":
        return cls(np.zeros((d, d)))

    @property
    def d(self) -> int:
        return self.ell.shape[0]

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.Mtilde + self.ell

    def __neg__(self):
        return GrowthMap(-self.Mtilde, -self.ell)

    def __repr__(self):
        return f"GrowthMap(Mtilde={self.Mtilde.tolist()}, ell={self.ell.tolist()})"


@dataclass(frozen=True)
class GrowthPair:
    """A map ``M`` and slack ``epsilon >= 0`` bounding the weight oscillation."""

    M: GrowthMap | Callable
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")


class SampledF2:
    """Multilinear interpolant of ``F2 a(x, k)`` samples.

    Parameters
    ----------
    F : PhaseGridFunction
        Samples in the ``(x, k)`` domain.
    outside : {"raise", "zero"}
        Policy for arguments beyond the sampled box.
    """

    def __init__(self, F: PhaseGridFunction, outside: str = "raise"):
        if F.domain != "k":
            raise ValueError("SampledF2 needs samples of F2 a(x, k)")
        if outside not in ("raise", "zero"):
            raise ValueError(f"unknown outside policy {outside!r}")
        self.F = F
        self.d = F.d
        self.outside = outside
        self.origin = np.array([-L for L in F.xspec.L + F.pspec.L])
        self.step = np.array(F.xspec.h + F.pspec.h)
        self.values = np.ascontiguousarray(F.values)

    def __call__(self, x, k):
        x = np.asarray(x, dtype=float)
        k = np.asarray(k, dtype=float)
        x, k = np.broadcast_arrays(x, k)
        shape = x.shape[:-1]
        pts = np.concatenate([x, k], axis=-1).reshape(-1, 2 * self.d)
        out, bad = _backend.interp_multilinear(self.origin, self.step, self.values, pts, True)
        if bad >= 0 and self.outside == "raise":
            p = pts[bad]
            raise ValueError(
                f"interpolation out of range at x={p[:self.d].tolist()}, k={p[self.d:].tolist()}"
            )
        return out.reshape(shape)


class SymbolF2:
    """Symbol ``a = a0 + ab`` in ``HS(M) = HS0(M) + B``.

    Parameters
    ----------
    d : int
        Dimension of position space.
    hs0 : callable, optional
        ``(x, k) -> F2 a0(x, k)``; ``None`` means ``a0 = 0``.
    b_part : callable, optional
        ``x -> ab(x)``; ``None`` means ``ab = 0``.
    position : callable, optional
        ``(x, xi) -> a0(x, xi)`` when known in closed form.
    """

    def __init__(self, d: int, hs0=None, b_part=None, name: str = "", position=None):
        self.d = int(d)
        self.hs0 = hs0
        self.b_part = b_part
        self.position = position
        self.name = name

    def __repr__(self):
        parts = [p for p, f in (("hs0", self.hs0), ("b", self.b_part)) if f is not None]
        return f"SymbolF2({self.name or '?'}, d={self.d}, parts={parts})"

    # evaluation

    def eval_hs0(self, x, k) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = np.asarray(k, dtype=float)
        shape = np.broadcast_shapes(x.shape, k.shape)[:-1]
        if self.hs0 is None:
            return np.zeros(shape, dtype=complex)
        return np.broadcast_to(np.asarray(self.hs0(x, k), dtype=complex), shape)

    def eval_b(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.b_part is None:
            return np.zeros(x.shape[:-1], dtype=complex)
        return np.broadcast_to(np.asarray(self.b_part(x), dtype=complex), x.shape[:-1])

    # constructors

    @classmethod
    def zero(cls, d: int) -> "SymbolF2":
        return cls(d, name="0")

    @classmethod
    def identity(cls, d: int) -> "SymbolF2":
        return cls(d, b_part=lambda x: np.ones(x.shape[:-1]), name="1")

    @classmethod
    def multiplier(cls, fn, d: int = 1, name: str = "") -> "SymbolF2":
        """Pure multiplier symbol ``ab(x) = fn(x)``."""
        return cls(d, b_part=fn, name=name or "multiplier")

    @classmethod
    def gaussian(cls, s: float, d: int = 1) -> "SymbolF2":
        """``a(x, xi) = exp(-s |xi|^2)`` with ``F2 a = (2s)^{-d/2} exp(-|k|^2/4s)``."""
        if not s > 0:
            raise ValueError("Gaussian width must be positive")

        def hs0(x, k):
            k = np.asarray(k)
            return (2.0 * s) ** (-d / 2) * np.exp(-np.sum(k * k, axis=-1) / (4.0 * s))

        def position(x, xi):
            xi = np.asarray(xi)
            return np.exp(-s * np.sum(xi * xi, axis=-1))

        return cls(d, hs0=hs0, position=position, name=f"gaussian(s={s})")

    @classmethod
    def from_samples(cls, F: PhaseGridFunction, b_part=None, outside: str = "raise", name=""):
        return cls(F.d, hs0=SampledF2(F, outside), b_part=b_part, name=name or "sampled")

    # linear structure

    def __add__(self, other: "SymbolF2") -> "SymbolF2":
        if not isinstance(other, SymbolF2):
            return NotImplemented
        if other.d != self.d:
            raise ValueError("symbols must share a dimension")
        return SymbolF2(
            self.d,
            hs0=_add(self.hs0, other.hs0),
            b_part=_add(self.b_part, other.b_part),
            position=_add(self.position, other.position) if _positions_known(self, other) else None,
            name=f"({self.name} + {other.name})",
        )

    def __rmul__(self, alpha) -> "SymbolF2":
        alpha = complex(alpha)
        scale = lambda f: None if f is None else (lambda *args: alpha * f(*args))  # noqa: E731
        return SymbolF2(
            self.d,
            hs0=scale(self.hs0),
            b_part=scale(self.b_part),
            position=scale(self.position),
            name=f"{alpha:g}*{self.name}",
        )

    def __neg__(self):
        return -1.0 * self

    def __sub__(self, other):
        return self + (-other)

    def sample_hs0(self, xspec: GridSpec, kspec: GridSpec) -> PhaseGridFunction:
        """``F2 a0`` sampled on ``xspec x kspec``."""
        return PhaseGridFunction.from_callable(xspec, kspec, self.eval_hs0, domain="k")


def _positions_known(*syms) -> bool:
    return all(s.hs0 is None or s.position is not None for s in syms)


def _add(f, g):
    if f is None:
        return g
    if g is None:
        return f
    return lambda *args: f(*args) + g(*args)


@dataclass(frozen=True)
class HSNormReport:
    """Grid-realised ``HS(M)`` norm of a symbol.

    ``g_max[k]`` is the sup over the x-grid of ``|g_a(x, k)|``; it is the
    tightest majorant the grid can see, so ``hs0_norm`` never exceeds the
    continuum norm.
    """

    kspec: GridSpec
    g_max: np.ndarray = field(repr=False)
    hs0_norm: float
    b_norm: float

    @property
    def total(self) -> float:
        return self.hs0_norm + self.b_norm


def _evaluate_M(M, x):
    return np.asarray(M(x), dtype=float)


def g_of(sym: SymbolF2, M, x, k) -> np.ndarray:
    """``g_a(x, k) = (2 pi)^{-d/2} F2 a0(x, k) exp(|k . M(x)|)``."""
    d = sym.d
    F = sym.eval_hs0(x, k)
    s = np.abs(np.sum(np.asarray(k, dtype=float) * _evaluate_M(M, x), axis=-1))
    s = np.broadcast_to(s, F.shape)
    mag = np.abs(F)
    nz = mag > 0
    with np.errstate(divide="ignore"):
        logmag = np.where(nz, np.log(np.where(nz, mag, 1.0)) + s, -np.inf)
    if np.any(logmag > EXP_CAP):
        raise ValueError("g blow-up: symbol not in HS0(M) on this grid")
    phase = np.where(nz, np.exp(1j * np.angle(F)), 0.0)
    return (2.0 * np.pi) ** (-d / 2) * phase * np.exp(logmag)


def _x_chunks(xs: np.ndarray, nk: int):
    rows = max(1, _CHUNK // max(nk, 1))
    for start in range(0, xs.shape[0], rows):
        yield xs[start:start + rows]


def hs_norm(sym: SymbolF2, M, xspec: GridSpec, kspec: GridSpec) -> HSNormReport:
    """Grid ``HS(M)`` norm: quadrature over k of sup over x of ``|g_a|``, plus sup ``|ab|``."""
    ks = kspec.flat_points()
    xs = xspec.flat_points()
    g_max = np.zeros(ks.shape[0])
    if sym.hs0 is not None:
        for chunk in _x_chunks(xs, ks.shape[0]):
            g = g_of(sym, M, chunk[:, None, :], ks[None, :, :])
            g_max = np.maximum(g_max, np.max(np.abs(g), axis=0))
    hs0 = kspec.cell * float(np.sum(g_max))
    b = float(np.max(np.abs(sym.eval_b(xs)))) if sym.b_part is not None else 0.0
    return HSNormReport(kspec, g_max.reshape(kspec.shape), hs0, b)


def strip_extend(sym: SymbolF2, M, x, xi, t: float, kspec: GridSpec) -> np.ndarray:
    """``a(x, xi + i t M(x))`` through its Fourier integral over ``kspec``.

    ``x`` is a single point; ``xi`` may be an array of shape ``(..., d)``.
    """
    if abs(t) > 1:
        raise ValueError("strip parameter t must lie in [-1, 1]")
    d = sym.d
    x = np.asarray(x, dtype=float).reshape(d)
    xi = np.asarray(xi, dtype=float)
    ks = kspec.flat_points()
    F = sym.eval_hs0(x[None, :], ks)
    damp = np.exp(-t * (ks @ _evaluate_M(M, x)))
    osc = np.exp(1j * xi.reshape(-1, d) @ ks.T)
    out = osc @ (F * damp) * kspec.cell / (2.0 * np.pi) ** (d / 2)
    out = out.reshape(xi.shape[:-1])
    return out + sym.eval_b(x)


def quadratic_growth_pair(pot: QuadraticPotential, p: PExponent) -> GrowthPair:
    """``M(x) = M_p (c^2 N x + c l / 2)`` with ``epsilon = 0``."""
    c = pot.c
    return GrowthPair(GrowthMap(p.M * c * c * pot.N, p.M * c * pot.l / 2.0), 0.0)


def growth_pair_scan(pot: Potential, p: PExponent, gp: GrowthPair, spec: GridSpec):
    """``(eps_hat, x, y)``: the worst violation over all grid point pairs."""
    pts = spec.flat_points()
    phi = pot.value(pts)
    coef = abs(p.kernel_weight)
    c = pot.c
    if isinstance(gp.M, GrowthMap):
        eps, i, j = _backend.growth_pair_scan(pts, phi, gp.M.Mtilde, gp.M.ell, c, coef)
    else:
        eps, i, j = 0.0, 0, 0
        for a in range(pts.shape[0]):
            diff = (pts[a] - pts) / c
            Mv = _evaluate_M(gp.M, (pts[a] + pts) / (2.0 * c))
            val = np.abs(coef * np.abs(phi[a] - phi) - np.abs(np.sum(diff * Mv, axis=-1)))
            b = int(np.argmax(val))
            if val[b] > eps:
                eps, i, j = float(val[b]), a, b
    return float(eps), pts[i].copy(), pts[j].copy()


def validate_growth_pair(pot: Potential, p: PExponent, gp: GrowthPair, spec: GridSpec) -> float:
    """Sampled left-hand side of the growth-pair inequality; compare with ``gp.epsilon``."""
    return growth_pair_scan(pot, p, gp, spec)[0]


def r_bound_integral(G: GridFunction) -> float:
    """``int sup_{|y| >= |x|} G(y) dx`` on the grid of ``G``."""
    vals = np.real(np.asarray(G.values)).reshape(-1)
    if np.any(vals < 0) or not np.all(np.isfinite(vals)):
        raise ValueError("majorant must be finite and non-negative")
    r = np.linalg.norm(G.spec.flat_points(), axis=-1)
    order = np.argsort(r, kind="stable")
    r_sorted = r[order]
    suffix = np.maximum.accumulate(vals[order][::-1])[::-1]
    first = np.searchsorted(r_sorted, r, side="left")
    return G.spec.cell * float(np.sum(suffix[first]))
