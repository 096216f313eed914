"""Uniform tensor grids, Riemann quadrature and the partial Fourier transform.

Grids are half-open boxes ``[-L, L)`` per axis with an even number of
points.  The momentum grid dual to a grid with half-width ``L`` and ``n``
points has spacing ``pi / L`` and the same number of points, so that the
pair is related by a single FFT.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "GridFunction",
    "PhaseGridFunction",
    "interior_mask",
    "quadrature",
    "partial_fourier_forward",
    "partial_fourier_inverse",
]


def _as_tuple(value, d: int, cast) -> tuple:
    arr = np.atleast_1d(np.asarray(value))
    if arr.size == 1:
        arr = np.repeat(arr, d)
    if arr.size != d:
        raise ValueError(f"expected {d} per-axis values, got {arr.size}")
    return tuple(cast(v) for v in arr)


@dataclass(frozen=True)
class GridSpec:
    """Uniform tensor grid ``x_j = -L + j*h`` with ``h = 2L/n`` on each axis.

    Parameters
    ----------
    L : tuple of float
        Per-axis half-width.
    n : tuple of int
        Per-axis point count; even and at least 8.
    """

    L: tuple[float, ...]
    n: tuple[int, ...]

    def __post_init__(self):
        if len(self.L) != len(self.n):
            raise ValueError("L and n must have the same length")
        if self.d not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.d}")
        for L, n in zip(self.L, self.n):
            if not (np.isfinite(L) and L > 0):
                raise ValueError(f"half-width must be positive, got {L}")
            if n < 8:
                raise ValueError(f"need at least 8 points per axis, got {n}")
            if n % 2:
                raise ValueError(f"point count must be even, got {n}")

    @classmethod
    def uniform(cls, d: int, L, n) -> "GridSpec":
        return cls(_as_tuple(L, d, float), _as_tuple(n, d, int))

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def h(self) -> tuple[float, ...]:
        return tuple(2.0 * L / n for L, n in zip(self.L, self.n))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.n)

    @property
    def size(self) -> int:
        return int(np.prod(self.n))

    @property
    def cell(self) -> float:
        """Volume element ``h_1 * ... * h_d``."""
        return float(np.prod(self.h))

    @property
    def axes(self) -> list[np.ndarray]:
        return [-L + np.arange(n) * (2.0 * L / n) for L, n in zip(self.L, self.n)]

    def points(self) -> np.ndarray:
        """Grid points as an array of shape ``shape + (d,)``."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    def flat_points(self) -> np.ndarray:
        """Grid points in row-major order, shape ``(size, d)``."""
        return self.points().reshape(-1, self.d)

    def dual(self) -> "GridSpec":
        """The FFT-paired grid: spacing ``pi/L``, same point count."""
        return GridSpec(tuple(n * np.pi / (2.0 * L) for L, n in zip(self.L, self.n)), self.n)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        """Mask of points lying in the closed hull of the grid nodes."""
        pts = np.asarray(pts, dtype=float)
        ok = np.ones(pts.shape[:-1], dtype=bool)
        for i, ax in enumerate(self.axes):
            ok &= (pts[..., i] >= ax[0]) & (pts[..., i] <= ax[-1])
        return ok


def interior_mask(spec: GridSpec, margin: float = 0.1) -> np.ndarray:
    """Mask excluding a fraction ``margin`` of each half-width at both ends."""
    mask = np.ones(spec.shape, dtype=bool)
    for i, (L, ax) in enumerate(zip(spec.L, spec.axes)):
        keep = np.abs(ax) <= (1.0 - margin) * L
        shape = [1] * spec.d
        shape[i] = -1
        mask &= keep.reshape(shape)
    return mask


def _check_finite(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite samples")


@dataclass(frozen=True)
class GridFunction:
    """Complex samples of a function on a :class:`GridSpec`."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.spec.shape:
            values = values.reshape(self.spec.shape)
        _check_finite(values)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, spec: GridSpec, fn) -> "GridFunction":
        return cls(spec, fn(spec.points()))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.spec, values)


@dataclass(frozen=True)
class PhaseGridFunction:
    """Samples on a position grid times a momentum grid.

    ``domain`` is ``"xi"`` for samples of ``a(x, xi)`` and ``"k"`` for
    samples of the partial transform ``F2 a(x, k)``.  ``values`` has shape
    ``xspec.shape + pspec.shape``.
    """

    xspec: GridSpec
    pspec: GridSpec
    values: np.ndarray = field(repr=False)
    domain: str = "xi"

    def __post_init__(self):
        if self.domain not in ("xi", "k"):
            raise ValueError(f"domain must be 'xi' or 'k', got {self.domain!r}")
        if self.xspec.d != self.pspec.d:
            raise ValueError("position and momentum grids must share a dimension")
        values = np.asarray(self.values, dtype=complex)
        shape = self.xspec.shape + self.pspec.shape
        if values.shape != shape:
            values = values.reshape(shape)
        _check_finite(values)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def d(self) -> int:
        return self.xspec.d

    @classmethod
    def from_callable(cls, xspec: GridSpec, pspec: GridSpec, fn, domain: str = "xi"):
        """Sample ``fn(x, p)`` with ``x``, ``p`` broadcast to shape ``(..., d)``."""
        d = xspec.d
        x = xspec.points().reshape(xspec.shape + (1,) * d + (d,))
        p = pspec.points().reshape((1,) * d + pspec.shape + (d,))
        return cls(xspec, pspec, np.broadcast_to(fn(x, p), xspec.shape + pspec.shape), domain)


def quadrature(f: GridFunction) -> complex:
    """Riemann sum ``h^d * sum(values)``.

    numpy reduces contiguous float arrays pairwise, so the result does not
    depend on how the caller chunked the data.
    """
    values = np.asarray(f.values)
    _check_finite(values)
    return complex(f.spec.cell * np.sum(values))


def _phase(spec: GridSpec, sign: int) -> np.ndarray:
    """Outer product over axes of ``exp(sign * i * L_xi * k)`` on the dual grid."""
    kspec = spec.dual()
    out = np.ones((), dtype=complex)
    for L, k in zip(spec.L, kspec.axes):
        out = np.multiply.outer(out, np.exp(sign * 1j * L * k))
    return out


def partial_fourier_forward(a: PhaseGridFunction) -> PhaseGridFunction:
    """``F2 a(x, k) = (2 pi)^{-d/2} int a(x, xi) exp(-i k.xi) dxi`` per x-row."""
    if a.domain != "xi":
        raise ValueError("partial_fourier_forward expects samples in (x, xi)")
    d = a.d
    axes = tuple(range(d, 2 * d))
    spec = a.pspec
    raw = np.fft.fftshift(np.fft.fftn(a.values, axes=axes), axes=axes)
    scale = spec.cell / (2.0 * np.pi) ** (d / 2)
    out = scale * raw * _phase(spec, +1)
    return PhaseGridFunction(a.xspec, spec.dual(), out, domain="k")


def partial_fourier_inverse(F: PhaseGridFunction) -> PhaseGridFunction:
    """Inverse of :func:`partial_fourier_forward`; exact up to rounding."""
    if F.domain != "k":
        raise ValueError("partial_fourier_inverse expects samples in (x, k)")
    d = F.d
    axes = tuple(range(d, 2 * d))
    kspec = F.pspec
    xispec = kspec.dual()
    shifted = np.fft.ifftshift(F.values * _phase(xispec, -1), axes=axes)
    raw = np.fft.ifftn(shifted, axes=axes) * kspec.size
    scale = kspec.cell / (2.0 * np.pi) ** (d / 2)
    return PhaseGridFunction(F.xspec, xispec, scale * raw, domain="xi")

