"""Mourre symbol G_kappa^E, the interpolation system M rho = 0, and positivity checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bands import solve_band_endpoint
from .chebyshev import cheb_U, cheb_U_deriv
from .exceptions import AmbiguousNullspace

# singular values below this fraction of the largest count as zero
NULLITY_RTOL = 1e-13


@dataclass(frozen=True)
class SigmaPlan:
    """Index set Sigma = [j_1 kappa, ..., j_N kappa] for band n."""

    kappa: int
    band: int
    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if self.kappa < 2:
            raise ValueError(f"kappa must be >= 2, got {self.kappa}")
        if self.band < 1:
            raise ValueError(f"band must be >= 1, got {self.band}")
        if not self.indices:
            raise ValueError("Sigma must be nonempty")
        for idx in self.indices:
            if idx <= 0 or idx % self.kappa:
                raise ValueError(f"index {idx} is not a positive multiple of kappa={self.kappa}")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("Sigma must be strictly increasing")

    @property
    def multipliers(self) -> tuple[int, ...]:
        return tuple(i // self.kappa for i in self.indices)


@dataclass(frozen=True)
class CoefficientSolution:
    rho: dict[int, float]
    singular_values: tuple[float, ...]
    nullity: int

    def vector(self) -> np.ndarray:
        return np.array(list(self.rho.values()))


@dataclass(frozen=True)
class ValidityVerdict:
    valid: bool
    min_value: float
    witness: tuple[float, float]
    e_grid: int
    x_grid: int


def g_symbol(kappa: int, j: int, E, x):
    """g_{j kappa}^E(x) = (1 - x^2) U_{j kappa - 1}(x) + (1 - y^2) U_{j kappa - 1}(y), y = E - x."""
    m = j * kappa - 1
    if isinstance(x, float):
        y = E - x
        return (1.0 - x * x) * cheb_U(m, x) + (1.0 - y * y) * cheb_U(m, y)
    x = np.asarray(x, dtype=float)
    y = E - x
    out = (1.0 - x * x) * cheb_U(m, x) + (1.0 - y * y) * cheb_U(m, y)
    return float(out) if out.ndim == 0 else out


def g_symbol_deriv(kappa: int, j: int, E, x):
    """d/dx of :func:`g_symbol`."""
    m = j * kappa - 1
    if not isinstance(x, float):
        x = np.asarray(x, dtype=float)
    y = E - x
    out = (
        -2.0 * x * cheb_U(m, x)
        + (1.0 - x * x) * cheb_U_deriv(m, x)
        + 2.0 * y * cheb_U(m, y)
        - (1.0 - y * y) * cheb_U_deriv(m, y)
    )
    return float(out) if np.ndim(out) == 0 else out


def _endpoint_rows(kappa, multipliers, n):
    sol = solve_band_endpoint(kappa, n)
    X = np.array(sol.X)
    values = np.column_stack([g_symbol(kappa, j, sol.E, X) for j in multipliers])
    interior = X[1:-1]
    if interior.size == 0:
        return values
    derivs = np.column_stack([g_symbol_deriv(kappa, j, sol.E, interior) for j in multipliers])
    return np.vstack([values, derivs])


def assemble_constraints(plan: SigmaPlan) -> np.ndarray:
    """Rows of M: G and G' must vanish on the chains of E_n and E_{n-1}.

    For each endpoint, one value row per chain point and one derivative row
    per interior chain point.  Duplicate and identically zero rows are kept.
    """
    mult = plan.multipliers
    return np.vstack([
        _endpoint_rows(plan.kappa, mult, plan.band),
        _endpoint_rows(plan.kappa, mult, plan.band - 1),
    ])


def solve_coefficients(plan: SigmaPlan) -> CoefficientSolution:
    """Normalized nullspace vector of M with rho[first index] = 1.

    Columns are scaled to unit norm before the SVD so that the nullity
    test does not depend on the magnitude of individual symbols.
    """
    M = assemble_constraints(plan)
    norms = np.linalg.norm(M, axis=0)
    norms[norms == 0.0] = 1.0
    scaled = M / norms
    _, s, vt = np.linalg.svd(scaled)
    ncols = scaled.shape[1]
    full = np.zeros(ncols)
    full[: s.size] = s
    nullity = int(np.sum(full <= NULLITY_RTOL * full[0])) if full[0] > 0 else ncols
    if nullity != 1:
        raise AmbiguousNullspace(nullity, tuple(full))
    v = vt[-1] / norms
    v = v / v[0]
    rho = {idx: float(c) for idx, c in zip(plan.indices, v)}
    return CoefficientSolution(rho, tuple(float(x) for x in full), nullity)


def evaluate_G(kappa: int, rho: dict[int, float], E, x):
    """G_kappa^E(x) = sum over Sigma of rho_{j kappa} g_{j kappa}^E(x)."""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for idx, coef in rho.items():
        if idx % kappa:
            raise ValueError(f"index {idx} is not a multiple of kappa={kappa}")
        total = total + coef * g_symbol(kappa, idx // kappa, E, x)
    return float(total) if total.ndim == 0 else total


def sample_G(kappa, rho, E_values, x_grid: int, half: bool = False):
    """Minimum of G over x in [E-1, 1] for each E; returns (mins, argmins)."""
    mins, where = [], []
    for E in E_values:
        hi = E / 2 if half else 1.0
        xs = np.linspace(E - 1.0, hi, x_grid)
        G = evaluate_G(kappa, rho, E, xs)
        k = int(np.argmin(G))
        mins.append(float(G[k]))
        where.append(float(xs[k]))
    return np.array(mins), np.array(where)


def validate_sigma(plan: SigmaPlan, e_grid: int = 101, x_grid: int = 2001,
                   margin: float = 0.0, half: bool = False) -> ValidityVerdict:
    """Check G > margin on e_grid interior energies of (E_n, E_{n-1}) and x_grid points of [E-1, 1].

    With ``half=True`` only x in [E-1, E/2] is sampled, which suffices by
    the symmetry x -> E - x.
    """
    if e_grid < 3 or x_grid < 3:
        raise ValueError("grid sizes must be >= 3")
    sol = solve_coefficients(plan)
    lo = solve_band_endpoint(plan.kappa, plan.band).E
    hi = solve_band_endpoint(plan.kappa, plan.band - 1).E
    energies = np.linspace(lo, hi, e_grid + 2)[1:-1]
    mins, where = sample_G(plan.kappa, sol.rho, energies, x_grid, half=half)
    k = int(np.argmin(mins))
    min_value = float(mins[k])
    return ValidityVerdict(min_value > margin, min_value,
                           (float(energies[k]), float(where[k])), e_grid, x_grid)
