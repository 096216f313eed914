"""Moyal product of symbols through its four partial-Fourier component formulas."""

from __future__ import annotations

import numpy as np

from . import _backend
from .grid import GridSpec, PhaseGridFunction
from .symbol import SampledF2, SymbolF2

__all__ = [
    "MoyalIntegral",
    "moyal_00",
    "moyal_0b",
    "moyal_b0",
    "moyal_bb",
    "moyal",
    "identity_symbol",
]

_CHUNK = 1 << 20


class MoyalIntegral:
    """Lazy twisted convolution of two ``F2`` evaluators.

    ``(2 pi)^{-d/2} sum_v F1(x + (v-k)/2, v) F2(x + v/2, k - v) dv`` over the
    nodes of ``vspec``; each call evaluates both factors exactly at the
    shifted arguments, so no interpolation error enters.
    """

    def __init__(self, f1, f2, vspec: GridSpec):
        self.f1 = f1
        self.f2 = f2
        self.vspec = vspec
        self.d = vspec.d
        self._v = vspec.flat_points()
        self._weight = vspec.cell * (2.0 * np.pi) ** (-self.d / 2)

    def __call__(self, x, k):
        x, k = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(k, dtype=float))
        shape = x.shape[:-1]
        xf = x.reshape(-1, self.d)
        kf = k.reshape(-1, self.d)
        v = self._v[None, :, :]
        out = np.empty(xf.shape[0], dtype=complex)
        step = max(1, _CHUNK // self._v.shape[0])
        for s in range(0, xf.shape[0], step):
            xs = xf[s:s + step, None, :]
            ks = kf[s:s + step, None, :]
            g1 = self.f1(xs + 0.5 * (v - ks), v)
            g2 = self.f2(xs + 0.5 * v, ks - v)
            out[s:s + step] = self._weight * np.sum(g1 * g2, axis=1)
        return out.reshape(shape)


def _range_check(F: SampledF2, xspec: GridSpec, kspec: GridSpec, vspec: GridSpec, first: bool):
    # every shifted argument is affine in (x, k, v), so box corners bound it
    lo = lambda s: np.array([-L for L in s.L])  # noqa: E731
    hi = lambda s: np.array([-L + (n - 1) * h for L, n, h in zip(s.L, s.n, s.h)])  # noqa: E731
    xl, xh, kl, kh, vl, vh = lo(xspec), hi(xspec), lo(kspec), hi(kspec), lo(vspec), hi(vspec)
    if first:
        arg_x = (xl + 0.5 * (vl - kh), xh + 0.5 * (vh - kl))
        arg_k = (vl, vh)
    else:
        arg_x = (xl + 0.5 * vl, xh + 0.5 * vh)
        arg_k = (kl - vh, kh - vl)
    tol = 1e-9 * np.array(F.step)
    tab_lo = F.origin
    tab_hi = F.origin + (np.array(F.values.shape) - 1) * F.step
    lo_all = np.concatenate([arg_x[0], arg_k[0]])
    hi_all = np.concatenate([arg_x[1], arg_k[1]])
    if np.any(lo_all < tab_lo - tol) or np.any(hi_all > tab_hi + tol):
        which = "x + (v - k)/2, v" if first else "x + v/2, k - v"
        raise ValueError(
            f"interpolation out of range for shift ({which}): arguments span "
            f"[{lo_all.tolist()}, {hi_all.tolist()}], table covers [{tab_lo.tolist()}, {tab_hi.tolist()}]"
        )


def _default_vspec(a1: SymbolF2, a2: SymbolF2, out) -> GridSpec:
    sampled = [a.hs0.F.pspec for a in (a1, a2) if isinstance(a.hs0, SampledF2)]
    if sampled:
        return min(sampled, key=lambda s: s.h)
    if out is not None:
        return out[1]
    raise ValueError("a v-grid is required when both factors are closed-form")


def moyal_00(a1: SymbolF2, a2: SymbolF2, vspec: GridSpec | None = None, out=None,
             outside: str = "raise") -> SymbolF2:
    """Product of two ``HS0`` parts.

    Parameters
    ----------
    a1, a2 : SymbolF2
        Only the ``hs0`` parts are used.
    vspec : GridSpec, optional
        Integration grid in ``v``; defaults to the finer sampled k-grid, else
        the out k-grid.
    out : (GridSpec, GridSpec), optional
        ``(x, k)`` grids on which to tabulate the result.  Without it the
        result evaluates the integral lazily at any point.
    outside : {"raise", "zero"}
        Extrapolation policy for sampled factors and for a tabulated result.
    """
    d = a1.d
    if a1.hs0 is None or a2.hs0 is None:
        return SymbolF2.zero(d)
    vspec = vspec or _default_vspec(a1, a2, out)
    both_sampled = isinstance(a1.hs0, SampledF2) and isinstance(a2.hs0, SampledF2)
    if out is None:
        return SymbolF2(d, hs0=MoyalIntegral(a1.hs0, a2.hs0, vspec), name=f"{a1.name}#{a2.name}")
    xspec, kspec = out
    if both_sampled:
        F1, F2 = a1.hs0, a2.hs0
        if outside == "raise":
            _range_check(F1, xspec, kspec, vspec, True)
            _range_check(F2, xspec, kspec, vspec, False)
        weight = vspec.cell * (2.0 * np.pi) ** (-d / 2)
        vals = _backend.moyal00_sampled(
            F1.origin, F1.step, F1.values, F2.origin, F2.step, F2.values,
            xspec.flat_points(), kspec.flat_points(), vspec.flat_points(), weight,
        ).reshape(xspec.shape + kspec.shape)
    else:
        lazy = MoyalIntegral(a1.hs0, a2.hs0, vspec)
        vals = PhaseGridFunction.from_callable(xspec, kspec, lazy, domain="k").values
    table = PhaseGridFunction(xspec, kspec, vals, domain="k")
    return SymbolF2.from_samples(table, outside=outside, name=f"{a1.name}#{a2.name}")


def moyal_0b(a1: SymbolF2, b2) -> SymbolF2:
    """``F2 a1(x, k) * b2(x + k/2)``; ``b2`` is a callable or a symbol's multiplier part."""
    b2 = b2.b_part if isinstance(b2, SymbolF2) else b2
    if a1.hs0 is None or b2 is None:
        return SymbolF2.zero(a1.d)
    f1 = a1.hs0
    return SymbolF2(a1.d, hs0=lambda x, k: f1(x, k) * b2(x + 0.5 * k), name=f"{a1.name}#b")


def moyal_b0(b1, a2: SymbolF2) -> SymbolF2:
    """``b1(x - k/2) * F2 a2(x, k)``."""
    b1 = b1.b_part if isinstance(b1, SymbolF2) else b1
    if a2.hs0 is None or b1 is None:
        return SymbolF2.zero(a2.d)
    f2 = a2.hs0
    return SymbolF2(a2.d, hs0=lambda x, k: b1(x - 0.5 * k) * f2(x, k), name=f"b#{a2.name}")


def moyal_bb(b1, b2):
    """Pointwise product of multiplier parts; ``None`` stands for zero."""
    if b1 is None or b2 is None:
        return None
    return lambda x: b1(x) * b2(x)


def moyal(a1: SymbolF2, a2: SymbolF2, vspec: GridSpec | None = None, out=None,
          outside: str = "raise") -> SymbolF2:
    """Full Moyal product ``a1 # a2``; the multiplier parts never pass through ``F2``."""
    if a1.d != a2.d:
        raise ValueError("symbols must share a dimension")
    d = a1.d
    hs0 = SymbolF2.zero(d)
    if a1.hs0 is not None and a2.hs0 is not None:
        hs0 = hs0 + moyal_00(a1, a2, vspec, out, outside)
    hs0 = hs0 + moyal_0b(a1, a2) + moyal_b0(a1, a2)
    return SymbolF2(d, hs0=hs0.hs0, b_part=moyal_bb(a1.b_part, a2.b_part),
                    name=f"{a1.name}#{a2.name}")


def identity_symbol(d: int = 1) -> SymbolF2:
    """The unit ``1(x, xi) = 1`` of the Moyal algebra."""
    return SymbolF2.identity(d)
