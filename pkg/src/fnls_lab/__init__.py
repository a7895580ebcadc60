"""Spectral numerics for the radial fractional cubic Schrödinger equation on the unit disk."""
from .basis import BasisTable, build_basis, inner_product, lp_norm, quadrilinear_integral, radial_rule
from .config import ConfigError, SimConfig, make_rng
from .dynamics import (
    DiagnosticsRecord,
    NumericalFailure,
    SimState,
    conserved_quantities,
    energy,
    evolve,
    linear_flow,
    mass,
    simulate,
    strang_step,
)
from .field import (
    SpectralField,
    analyze,
    apply_fractional,
    cubic_nonlinearity,
    sobolev_norm,
    synthesize,
)
from .special_fn import BesselZeroTable, bessel_j, bessel_zero, bessel_zeros, mcmahon

__version__ = "0.1.0"
