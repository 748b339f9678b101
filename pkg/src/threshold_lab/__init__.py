"""Threshold energies of the 2-D discrete Laplacian via Chebyshev chain systems."""

from .bands import (BandWindow, ChainSolution, RateFit, band_sequence, chain_points,
                    closure_residual, rate_fit, solve_band_endpoint)
from .chebyshev import bezout_bracket, branch_step, cheb_T, cheb_U, cheb_U_deriv
from .highprec import MinPolyResult, find_min_poly, refine_endpoint, verify_poly_root
from .mourre import (CoefficientSolution, SigmaPlan, ValidityVerdict, assemble_constraints,
                     evaluate_G, g_symbol, g_symbol_deriv, solve_coefficients, validate_sigma)
from .refdata import ThresholdRecord, check_integrity, load_dataset

__version__ = "0.1.0"
