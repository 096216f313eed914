"""Discretised Weyl quantization on the flat (ground-state transformed) side.

The operator ``U_p a(Q,P) U_p^{-1}`` acting on ``L^p(dx)`` is materialised as
a dense matrix over a :class:`GridSpec` plus a diagonal from the multiplier
part of the symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridFunction, GridSpec
from .potential import EXP_CAP, PExponent, Potential
from .symbol import HSNormReport, SymbolF2

__all__ = [
    "KernelMatrix",
    "build_kernel",
    "apply",
    "young_upper_bound",
    "norm_lower_estimate",
    "weighted_lp_norm",
    "kernel_phase_grid",
]

_ROW_BLOCK = 64


@dataclass(frozen=True)
class KernelMatrix:
    """Quadrature-weighted kernel ``entries[y, x]`` and multiplier diagonal ``b_diag[y]``."""

    spec: GridSpec
    p: PExponent
    c: float
    entries: np.ndarray = field(repr=False)
    b_diag: np.ndarray = field(repr=False)

    def __post_init__(self):
        for arr in (self.entries, self.b_diag):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite kernel entries")
            arr.flags.writeable = False

    def dense(self) -> np.ndarray:
        """Full operator matrix ``entries + diag(b_diag)``."""
        return self.entries + np.diag(self.b_diag)


def kernel_phase_grid(spec: GridSpec, c: float) -> tuple[GridSpec, GridSpec]:
    """``(x, k)`` grids containing every kernel argument ``((x+y)/2c, (x-y)/c)``.

    A norm computed on these grids bounds the row and column sums of the
    kernel built on ``spec`` exactly.
    """
    L = tuple(v / c for v in spec.L)
    n = tuple(2 * m for m in spec.n)
    return GridSpec(L, n), GridSpec(tuple(2 * v for v in L), n)


def _row_block(sym, pot, p, pts, phi, rows, pref):
    y = pts[rows]
    c = pot.c
    mid = (pts[None, :, :] + y[:, None, :]) / (2.0 * c)
    diff = (pts[None, :, :] - y[:, None, :]) / c
    F = sym.eval_hs0(mid, diff)
    expo = p.kernel_weight * (phi[rows][:, None] - phi[None, :])
    if np.max(np.abs(expo), initial=0.0) > EXP_CAP:
        raise ValueError("weight overflow")
    return pref * F * np.exp(expo)


def build_kernel(sym: SymbolF2, pot: Potential, p: PExponent, spec: GridSpec,
                 executor=None) -> KernelMatrix:
    """Assemble the conjugated kernel of ``a(Q,P)`` on ``spec``.

    Parameters
    ----------
    sym : SymbolF2
        Symbol; its ``F2`` evaluator is called at ``((x+y)/2c, (x-y)/c)``.
    pot : Potential
        Supplies ``phi`` and the scaling ``c``.
    p : PExponent
        Target ``L^p`` space; sets the weight ``(1/2 - 1/p)(phi(y) - phi(x))``.
    spec : GridSpec
        Shared grid for both kernel arguments.
    executor : concurrent.futures.Executor, optional
        Row blocks are assembled through ``executor.map``; the result does not
        depend on it.

    Returns
    -------
    KernelMatrix
    """
    if sym.d != spec.d or pot.d != spec.d:
        raise ValueError("symbol, potential and grid dimensions differ")
    c = pot.c
    d = spec.d
    pts = spec.flat_points()
    phi = pot.value(pts)
    size = spec.size
    entries = np.zeros((size, size), dtype=complex)
    if sym.hs0 is not None:
        pref = spec.cell * (2.0 * np.pi) ** (-d / 2) * c ** (-d)
        blocks = [slice(s, min(s + _ROW_BLOCK, size)) for s in range(0, size, _ROW_BLOCK)]
        job = lambda rows: _row_block(sym, pot, p, pts, phi, rows, pref)  # noqa: E731
        results = executor.map(job, blocks) if executor is not None else map(job, blocks)
        for rows, block in zip(blocks, results):
            entries[rows] = block
    b_diag = np.array(sym.eval_b(pts / c), dtype=complex)
    return KernelMatrix(spec, p, c, entries, b_diag)


def apply(K: KernelMatrix, f: GridFunction) -> GridFunction:
    """``(Kf)(y) = sum_x entries[y, x] f(x) + b_diag[y] f(y)``."""
    if f.spec != K.spec:
        raise ValueError(f"shape mismatch: kernel on {K.spec}, function on {f.spec}")
    v = f.values.reshape(-1)
    out = K.entries @ v + K.b_diag * v
    return GridFunction(K.spec, out.reshape(K.spec.shape))


def young_upper_bound(report: HSNormReport, epsilon: float) -> float:
    """``exp(epsilon) * ||a||_HS``."""
    if not epsilon >= 0:
        raise ValueError("epsilon must be non-negative")
    return float(np.exp(epsilon) * report.total)


def weighted_lp_norm(values: np.ndarray, cell: float, p: float) -> float:
    a = np.abs(np.asarray(values)).reshape(-1)
    if np.isinf(p):
        return float(a.max(initial=0.0))
    return float((cell * np.sum(a**p)) ** (1.0 / p))


def _random_test_function(rng: np.random.Generator, spec: GridSpec) -> np.ndarray:
    pts = spec.points()
    L = np.array(spec.L)
    out = np.zeros(spec.shape, dtype=complex)
    for _ in range(int(rng.integers(1, 5))):
        centre = rng.uniform(-0.7, 0.7, spec.d) * L
        width = rng.uniform(0.05, 0.4) * L.min()
        freq = rng.normal(0.0, 1.0, spec.d)
        amp = complex(rng.normal(), rng.normal())
        r2 = np.sum(((pts - centre) / width) ** 2, axis=-1)
        out += amp * np.exp(-0.5 * r2 + 1j * (pts - centre) @ freq)
    return out


def norm_lower_estimate(K: KernelMatrix, p: float, trials: int = 32, seed: int = 0,
                        power_iterations: int = 200) -> float:
    """Largest observed ``||Kf||_p / ||f||_p`` over seeded random test functions.

    For ``p = 2`` a power iteration on ``A^* A`` (``A`` the dense operator)
    is also run and the larger value returned.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    p = float(p)
    rng = np.random.default_rng(seed)
    cell = K.spec.cell
    A = K.dense()
    best = 0.0
    for _ in range(trials):
        f = _random_test_function(rng, K.spec).reshape(-1)
        nf = weighted_lp_norm(f, cell, p)
        if nf == 0:
            continue
        best = max(best, weighted_lp_norm(A @ f, cell, p) / nf)
    if p == 2.0:
        v = rng.normal(size=A.shape[1]) + 1j * rng.normal(size=A.shape[1])
        v /= np.linalg.norm(v)
        AhA = A.conj().T @ A
        for _ in range(power_iterations):
            w = AhA @ v
            nw = np.linalg.norm(w)
            if nw == 0:
                break
            v = w / nw
        best = max(best, float(np.linalg.norm(A @ v)))
    return best
