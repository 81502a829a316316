"""Exact local densities of quadratic polynomials over unramified p-adic
fields, with closed forms cross-validated against brute-force counting."""

__version__ = "0.1.0"

from .errors import (BudgetExceeded, DegenerateInput, InternalInconsistency,
                     NonConvergent, NonUnit, PadicDensityError,
                     PrecisionExhausted, SpecMismatch)
from .fields import FieldSpec, default_modulus, is_irreducible
from .residue import (RingElem, frobenius, legendre_symbol, ring_arithmetic,
                      teichmuller_lift, teichmuller_units, trace_to_base)
from .padics import PadicApprox, Phase, char_phase, dyadic_unit_char
from .exact import ClosedValue, ExpSum, PhasedValue, compare, numeric_eval
from .quadratic import (QuadraticPolynomial, ReducedDyadic, ReducedNonDyadic,
                        Transform, apply_transform, constant_normalize,
                        reduce_dyadic, reduce_nondyadic, select_rho)
from .gauss import (anisotropic_exp_integral, dyadic_residue_gauss_sum,
                    gauss_sign, hyperbolic_exp_integral, residue_gauss_sum,
                    square_exp_integral, twisted_unit_integral,
                    unit_shell_integral)
from .density import (DensityResult, analyze_dyadic, analyze_nondyadic, beta,
                      beta_dyadic, beta_nondyadic, beta_rational)
from .oracle import (CountResult, count_density, density_ladder,
                     quadratic_phase_oracle, stabilized_density,
                     sum_integral_oracle)

__all__ = [
    "FieldSpec", "RingElem", "PadicApprox", "Phase", "ClosedValue", "ExpSum",
    "PhasedValue", "QuadraticPolynomial", "Transform", "ReducedNonDyadic",
    "ReducedDyadic", "DensityResult", "CountResult",
    "ring_arithmetic", "teichmuller_lift", "teichmuller_units",
    "trace_to_base", "frobenius", "legendre_symbol", "char_phase",
    "dyadic_unit_char", "compare", "numeric_eval",
    "reduce_nondyadic", "reduce_dyadic", "select_rho", "constant_normalize",
    "apply_transform", "residue_gauss_sum", "gauss_sign",
    "square_exp_integral", "twisted_unit_integral", "hyperbolic_exp_integral",
    "anisotropic_exp_integral", "unit_shell_integral",
    "dyadic_residue_gauss_sum", "analyze_nondyadic", "beta_nondyadic",
    "analyze_dyadic", "beta_dyadic", "beta", "beta_rational",
    "count_density", "stabilized_density", "density_ladder",
    "sum_integral_oracle", "quadratic_phase_oracle", "default_modulus",
    "is_irreducible",
    "PadicDensityError", "SpecMismatch", "NonUnit", "PrecisionExhausted",
    "DegenerateInput", "NonConvergent", "InternalInconsistency",
    "BudgetExceeded",
]
