"""Ornstein-Uhlenbeck semigroup symbols for quadratic potentials.

Every matrix function of ``N`` goes through a single symmetric
eigendecomposition; the complex-time quantities are scalar functions of the
eigenvalues.  Time ``z`` may be complex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potential import PExponent, QuadraticPotential
from .symbol import SymbolF2

__all__ = [
    "SymmetricEig",
    "POLE_GUARD",
    "n_z",
    "n_z_eigenvalues",
    "prefactor",
    "symbol_a_t",
    "sigma_min",
    "dominating_G_z",
    "G_integral",
    "in_EN",
    "in_EN_eps_delta",
    "rasterize_region",
    "pixel_centres",
]

POLE_GUARD = 1e-8
_ZERO_EIG = 1e-14


@dataclass(frozen=True)
class SymmetricEig:
    """Eigendecomposition ``N = V diag(lam) V^T``, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def of(cls, N) -> "SymmetricEig":
        if isinstance(N, SymmetricEig):
            return N
        N = np.atleast_2d(np.asarray(N, dtype=float))
        if N.shape[0] != N.shape[1] or not np.allclose(N, N.T, rtol=0, atol=1e-12):
            raise ValueError("N must be a real symmetric matrix")
        lam, V = np.linalg.eigh(0.5 * (N + N.T))
        eig = cls(lam, V)
        if np.linalg.norm(eig.reconstruct() - N) >= 1e-12 * max(1.0, np.linalg.norm(N)):
            raise ValueError("eigendecomposition failed to reproduce N")
        return eig

    @property
    def d(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T

    def apply(self, values) -> np.ndarray:
        """``V diag(values) V^T`` for per-eigenvalue (possibly complex) values."""
        V = self.eigenvectors
        return (V * np.asarray(values)) @ V.T

    def require_positive(self) -> None:
        if self.eigenvalues.min() <= _ZERO_EIG * max(1.0, abs(self.eigenvalues).max()):
            raise ValueError("N must be positive definite")


def _nearest_pole_distance(z: complex, lam: float) -> float:
    # poles of tanh(z lam) sit at i pi (m + 1/2) / lam
    m = np.rint(z.imag * lam / np.pi - 0.5)
    return min(abs(z - 1j * np.pi * (mm + 0.5) / lam) for mm in (m - 1, m, m + 1))


def _near_pole(eig: SymmetricEig, z: complex, guard: float) -> bool:
    return any(
        lam > _ZERO_EIG and _nearest_pole_distance(z, lam) <= guard for lam in eig.eigenvalues
    )


def n_z_eigenvalues(N, z: complex, guard: float = POLE_GUARD) -> np.ndarray:
    """Per-eigenvalue ``tanh(z lam) / lam`` (``z`` on the kernel of ``N``)."""
    eig = SymmetricEig.of(N)
    z = complex(z)
    if _near_pole(eig, z, guard):
        raise ValueError(f"z within delta_guard={guard:g} of a pole of tanh(zN)")
    lam = eig.eigenvalues
    out = np.empty(lam.shape, dtype=complex)
    zero = np.abs(lam) <= _ZERO_EIG
    out[zero] = z
    out[~zero] = np.tanh(z * lam[~zero]) / lam[~zero]
    return out


def n_z(N, z: complex, guard: float = POLE_GUARD) -> np.ndarray:
    """Complex symmetric matrix ``N^{-1} tanh(zN)``."""
    eig = SymmetricEig.of(N)
    return eig.apply(n_z_eigenvalues(eig, z, guard))


def prefactor(N, z: complex) -> complex:
    """``det(cosh(zN)^{-1} exp(zN)) = prod 2 / (1 + exp(-2 z lam))``."""
    w = complex(z) * SymmetricEig.of(N).eigenvalues
    # pick the form whose exponential cannot overflow
    sign = np.where(w.real >= 0, 1.0, -1.0)
    e = np.exp(-2.0 * sign * w)
    vals = np.where(w.real >= 0, 2.0 / (1.0 + e), 2.0 * e / (1.0 + e))
    return complex(np.prod(vals))


def symbol_a_t(pot: QuadraticPotential, z: complex) -> SymbolF2:
    """Closed-form semigroup symbol ``a_z`` for the potential ``x.Nx + l.x``.

    The returned symbol has a closed-form ``F2`` evaluator and a
    position-side evaluator ``position(x, xi)``; its multiplier part is zero.
    Times for which some ``Re(n_z) <= 0`` are refused, since the symbol is
    then not a decaying Gaussian.
    """
    eig = SymmetricEig.of(pot.N)
    z = complex(z)
    nz = n_z_eigenvalues(eig, z)
    if np.any(nz.real <= 0):
        raise ValueError(f"Re(N_z) not positive definite at z={z}: symbol refused")
    d, c = eig.d, pot.c
    V = eig.eigenvectors
    pref = prefactor(eig, z)
    inv_sqrt = 1.0 / np.sqrt(nz)
    det_inv_sqrt = complex(np.prod(inv_sqrt))
    if not np.isclose(abs(det_inv_sqrt) ** 2, 1.0 / abs(np.prod(nz)), rtol=1e-10, atol=0):
        raise ArithmeticError("principal square root branch inconsistent with det(N_z)")
    f2_coef = 2.0 ** (-d / 2) * c**d * det_inv_sqrt * pref
    cN = c * pot.N
    half_l = pot.l / 2.0

    def shifted(x):
        return (np.asarray(x, dtype=float) @ cN + half_l) @ V

    def hs0(x, k):
        w = shifted(x)
        kt = np.asarray(k, dtype=float) @ V
        expo = -(c * c / 4.0) * np.sum(kt * kt / nz, axis=-1) - np.sum(w * w * nz, axis=-1)
        return f2_coef * np.exp(expo)

    def position(x, xi):
        w = shifted(x)
        xt = np.asarray(xi, dtype=float) @ V
        expo = -np.sum(xt * xt * nz, axis=-1) / (c * c) - np.sum(w * w * nz, axis=-1)
        return pref * np.exp(expo)

    sym = SymbolF2(d, hs0=hs0, position=position, name=f"a_z(z={z:g})")
    sym.time = z
    return sym


def sigma_min(N, z: complex, p: PExponent) -> float:
    """Lowest eigenvalue of ``Re(N_z^{-1}) - M_p^2 Re(N_z)^{-1}``."""
    nz = n_z_eigenvalues(N, z)
    if np.any(nz.real == 0):
        raise ValueError("argument pi/2: sigma undefined")
    return float(np.min((1.0 / nz).real - p.M**2 / nz.real))


def dominating_G_z(N, l, c: float, p: PExponent, z: complex, k) -> np.ndarray:
    """Gaussian majorant of ``|g_{a_z}(x, k)|`` uniform in ``x``.

    ``l`` does not enter: the shift is absorbed by the growth map.
    """
    eig = SymmetricEig.of(N)
    sigma = sigma_min(eig, z, p)
    if not sigma > 0:
        raise ValueError("z outside E^N: no integrable majorant")
    nz = n_z_eigenvalues(eig, z)
    d = eig.d
    amp = c**d / (2.0**d * np.pi ** (d / 2)) * abs(np.prod(1.0 / np.sqrt(nz)) * prefactor(eig, z))
    k = np.asarray(k, dtype=float)
    return amp * np.exp(-(c * c / 4.0) * sigma * np.sum(k * k, axis=-1))


def G_integral(N, p: PExponent, z: complex) -> float:
    """Closed form of the majorant's integral, ``|det(sigma N_z)|^{-1/2} |prefactor|``."""
    eig = SymmetricEig.of(N)
    sigma = sigma_min(eig, z, p)
    if not sigma > 0:
        raise ValueError("z outside E^N: no integrable majorant")
    nz = n_z_eigenvalues(eig, z)
    return float(abs(np.prod(sigma * nz)) ** -0.5 * abs(prefactor(eig, z)))


def in_EN(N, z: complex, p: PExponent, guard: float = POLE_GUARD) -> bool:
    """Every ``n_z`` eigenvalue lies in the open sector ``|arg| < pi/2 - theta_p``."""
    eig = SymmetricEig.of(N)
    eig.require_positive()
    z = complex(z)
    if _near_pole(eig, z, guard):
        return False
    nz = np.tanh(z * eig.eigenvalues) / eig.eigenvalues
    if np.any(nz == 0):
        return False
    return bool(np.all(np.abs(np.angle(nz)) < np.pi / 2 - p.theta))


def _lattice_distance(z: complex, lam: float) -> float:
    # distance to {i pi m / (2 lam) : m != 0}
    step = np.pi / (2.0 * lam)
    m = np.rint(z.imag / step)
    cands = [mm for mm in (m - 1, m, m + 1) if mm != 0]
    return min(abs(z - 1j * step * mm) for mm in cands)


def in_EN_eps_delta(N, z: complex, p: PExponent, eps: float, delta: float) -> bool:
    """Uniform sub-region: ``cos^2(arg n_z) > M_p^2 + eps`` and ``delta`` away from the lattice.

    The sector is taken on the right half-plane, so this region is a subset of
    :func:`in_EN`.
    """
    eig = SymmetricEig.of(N)
    eig.require_positive()
    z = complex(z)
    lam = eig.eigenvalues
    if min(_lattice_distance(z, x) for x in lam) <= delta:
        return False
    nz = np.tanh(z * lam) / lam
    if np.any(nz.real <= 0):
        return False
    return bool(np.all(np.cos(np.angle(nz)) ** 2 > p.M**2 + eps))


def pixel_centres(bbox, resolution) -> tuple[np.ndarray, np.ndarray]:
    """Real-axis and imaginary-axis pixel centres; rows run from top (max Im) down.

    Centres are placed symmetrically about the box midpoint so that a box
    symmetric about the real axis gives exactly mirrored rows.
    """
    re_lo, re_hi, im_lo, im_hi = (float(v) for v in bbox)
    if not (re_hi > re_lo and im_hi > im_lo):
        raise ValueError("bounding box must have positive extent")
    nx, ny = (resolution, resolution) if np.isscalar(resolution) else resolution
    nx, ny = int(nx), int(ny)
    if min(nx, ny) < 16:
        raise ValueError("resolution must be at least 16")

    def centres(lo, hi, n):
        mid = 0.5 * (lo + hi)
        step = (hi - lo) / n
        return mid + 0.5 * (2.0 * np.arange(n) - (n - 1)) * step

    return centres(re_lo, re_hi, nx), centres(im_lo, im_hi, ny)[::-1]


def rasterize_region(N, p: PExponent, eps: float, delta: float, bbox, resolution,
                     uniform: bool = False, executor=None) -> np.ndarray:
    """Bitmap (``uint8``, 1 = inside) of ``in_EN`` or, with ``uniform``, ``in_EN_eps_delta``."""
    eig = SymmetricEig.of(N)
    eig.require_positive()
    re, im = pixel_centres(bbox, resolution)

    def row(y):
        if uniform:
            return [in_EN_eps_delta(eig, complex(x, y), p, eps, delta) for x in re]
        return [in_EN(eig, complex(x, y), p) for x in re]

    rows = list(executor.map(row, im)) if executor is not None else [row(y) for y in im]
    return np.array(rows, dtype=np.uint8)
