"""Weyl calculus for Ornstein-Uhlenbeck operators on weighted L^p spaces."""

from ._backend import NAME as backend
from .grid import (
    GridFunction,
    GridSpec,
    PhaseGridFunction,
    interior_mask,
    partial_fourier_forward,
    partial_fourier_inverse,
    quadrature,
)
from .moyal import identity_symbol, moyal_00, moyal_0b, moyal_b0, moyal_bb
from .ousg import (
    SymmetricEig,
    dominating_G_z,
    in_EN,
    in_EN_eps_delta,
    n_z,
    rasterize_region,
    sigma_min,
    symbol_a_t,
)
from .potential import (
    PExponent,
    PolynomialPotential1D,
    Potential,
    QuadraticPotential,
    c_phi,
    ou_apply,
    thm_h_residual,
    u_p_forward,
    u_p_inverse,
)
from .quantize import (
    KernelMatrix,
    apply,
    build_kernel,
    kernel_phase_grid,
    norm_lower_estimate,
    young_upper_bound,
)
from .symbol import (
    GrowthMap,
    GrowthPair,
    HSNormReport,
    SymbolF2,
    g_of,
    hs_norm,
    quadratic_growth_pair,
    r_bound_integral,
    strip_extend,
    validate_growth_pair,
)

__version__ = "0.1.0"
