import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from threshold_lab.bands import solve_band_endpoint
from threshold_lab.chebyshev import bezout_bracket, cheb_U
from threshold_lab.exceptions import AmbiguousNullspace
from threshold_lab.mourre import (SigmaPlan, assemble_constraints, evaluate_G, g_symbol,
                                  g_symbol_deriv, solve_coefficients, validate_sigma)
from threshold_lab.refdata import RHO_VECTORS, load_dataset

CASES = settings(max_examples=1000, deadline=None)
RHO_K4_N1 = {4: 1.0, 8: 625 / 1054}


def mp_g(kappa, j, E, x):
    m = j * kappa - 1
    y = E - x
    return (1 - x * x) * mp.chebyu(m, x) + (1 - y * y) * mp.chebyu(m, y)


@pytest.mark.parametrize("bad", [
    dict(kappa=4, band=1, indices=()),
    dict(kappa=4, band=1, indices=(4, 6)),
    dict(kappa=4, band=1, indices=(8, 4)),
    dict(kappa=4, band=0, indices=(4,)),
    dict(kappa=1, band=1, indices=(1,)),
])
def test_sigma_plan_validation(bad):
    with pytest.raises(ValueError):
        SigmaPlan(**bad)


def test_sigma_plan_multipliers():
    assert SigmaPlan(4, 2, [4, 8, 12, 24]).multipliers == (1, 2, 3, 6)


@pytest.mark.parametrize("kappa,j,E,x", [(2, 1, 2 / 3, 0.1), (4, 1, 1.6, 0.7), (3, 4, 1.2, 0.5)])
def test_g_symbol_deriv_matches_finite_difference(kappa, j, E, x):
    fd = float(mp.diff(lambda t: mp_g(kappa, j, E, t), mp.mpf(x)))
    assert g_symbol_deriv(kappa, j, E, x) == pytest.approx(fd, rel=1e-5, abs=1e-9)


@pytest.mark.parametrize("kappa,j,E", [(2, 1, 0.6), (4, 3, 1.55), (7, 2, 1.8)])
def test_g_symbol_deriv_vanishes_at_midpoint(kappa, j, E):
    assert g_symbol_deriv(kappa, j, E, E / 2) == pytest.approx(0.0, abs=1e-9)


def test_assemble_constraints_kappa4_band1():
    M = assemble_constraints(SigmaPlan(4, 1, [4, 8]))
    # E_1 chain: 3 values + 1 derivative; E_0 chain: 2 values + 0 derivatives
    assert M.shape == (6, 2)
    assert np.linalg.matrix_rank(M, tol=1e-10) == 1


def test_assemble_constraints_kappa2_band1_rank_one():
    M = assemble_constraints(SigmaPlan(2, 1, [2, 4]))
    assert np.linalg.matrix_rank(M, tol=1e-10) == 1


def test_kappa3_band5_nullity_one():
    sol = solve_coefficients(SigmaPlan(3, 5, range(3, 31, 3)))
    assert sol.nullity == 1
    assert list(sol.singular_values) == sorted(sol.singular_values, reverse=True)


def test_rho_kappa2_exact():
    sol = solve_coefficients(SigmaPlan(2, 1, [2, 4]))
    assert sol.rho[2] == 1.0
    assert sol.rho[4] == pytest.approx(9 / 14, abs=1e-12)


def test_rho_kappa4_band1_exact():
    assert solve_coefficients(SigmaPlan(4, 1, [4, 8])).rho[8] == pytest.approx(625 / 1054, abs=1e-10)


@pytest.mark.parametrize("key", sorted(RHO_VECTORS))
def test_reference_rho_vectors(key):
    kappa, band, sigma = key
    sol = solve_coefficients(SigmaPlan(kappa, band, sigma))
    assert sol.vector() == pytest.approx(np.array(RHO_VECTORS[key], dtype=float), abs=1e-4)


def test_kappa4_band3_alternative_sigma():
    sol = solve_coefficients(SigmaPlan(4, 3, [4, 8, 12, 16, 20, 24]))
    assert sol.vector() == pytest.approx([1, 1.37002, 1.06973, 0.53992, 0.16964, 0.02655], abs=1e-4)


def test_ambiguous_nullspace():
    # a single index cannot satisfy both value and derivative rows
    with pytest.raises(AmbiguousNullspace) as info:
        solve_coefficients(SigmaPlan(4, 2, [4]))
    assert info.value.nullity == 0


@pytest.mark.parametrize("kappa", range(2, 10))
def test_first_band_rho_oracle_and_bezout(kappa):
    # independent oracle: G(X_0) = 0 fixes rho_{2 kappa} = -g_kappa(X_0) / g_{2 kappa}(X_0)
    sol = solve_band_endpoint(kappa, 1)
    x0 = mp.mpf(sol.E) - 1
    oracle = -mp_g(kappa, 1, sol.E, x0) / mp_g(kappa, 2, sol.E, x0)
    rho = solve_coefficients(SigmaPlan(kappa, 1, [kappa, 2 * kappa])).rho[2 * kappa]
    assert rho == pytest.approx(float(oracle), abs=1e-8)
    f = lambda t: cheb_U(kappa - 1, t)  # noqa: E731
    g = lambda t: cheb_U(2 * kappa - 1, t)  # noqa: E731
    assert abs(bezout_bracket(f, g, sol.E - 1, sol.E / 2)) < 1e-9


def test_evaluate_G_vanishes_on_chain():
    sol = solve_band_endpoint(4, 1)
    for x in sol.X:
        assert abs(evaluate_G(4, RHO_K4_N1, sol.E, x)) < 1e-8


def test_evaluate_G_inside_and_at_band_edge():
    xs = np.linspace(0.65, 1.0, 2001)
    assert np.all(evaluate_G(4, RHO_K4_N1, 1.65, xs) > 0)
    xs = np.linspace(0.6, 1.0, 2001)
    assert np.min(evaluate_G(4, RHO_K4_N1, 1.6, xs)) == pytest.approx(0.0, abs=1e-8)


def test_evaluate_G_rejects_bad_index():
    with pytest.raises(ValueError):
        evaluate_G(4, {4: 1.0, 6: 1.0}, 1.6, 0.7)


@pytest.mark.parametrize("sigma,valid", [
    ([4, 8, 12, 24], True),
    ([4, 8, 12, 16], False),
])
def test_validate_sigma_kappa4_band2(sigma, valid):
    verdict = validate_sigma(SigmaPlan(4, 2, sigma))
    assert verdict.valid is valid
    assert verdict.valid == (verdict.min_value > 0)


def test_validate_sigma_kappa2_band5():
    assert validate_sigma(SigmaPlan(2, 5, list(range(2, 17, 2)) + [18, 20])).valid
    assert not validate_sigma(SigmaPlan(2, 5, list(range(2, 17, 2)) + [18, 24])).valid


def test_validate_sigma_half_interval_agrees():
    for rec in load_dataset("sigma")[:10]:
        plan = SigmaPlan(rec.kappa, rec.band, rec.indices)
        assert validate_sigma(plan, half=True).valid == validate_sigma(plan).valid


def test_validate_sigma_grid_checks():
    with pytest.raises(ValueError):
        validate_sigma(SigmaPlan(4, 1, [4, 8]), e_grid=1)


@CASES
@given(st.integers(2, 9), st.integers(1, 6), st.floats(0.0, 2.0), st.floats(0.0, 1.0))
def test_g_symbol_symmetry(kappa, j, E, t):
    a, b = g_symbol(kappa, j, E, E / 2 + t), g_symbol(kappa, j, E, E / 2 - t)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


@CASES
@given(st.integers(2, 9), st.integers(1, 4), st.floats(0.0, 2.0), st.floats(-0.99, 0.99))
def test_g_symbol_deriv_finite_difference(kappa, j, E, x):
    h = 1e-6
    if abs(E - x) > 0.99:
        return
    fd = (g_symbol(kappa, j, E, x + h) - g_symbol(kappa, j, E, x - h)) / (2 * h)
    d = g_symbol_deriv(kappa, j, E, x)
    assert abs(d - fd) <= 1e-5 * max(1.0, abs(d))


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_validity_scale_invariant(c):
    kappa, band = 4, 2
    sol = solve_coefficients(SigmaPlan(kappa, band, [4, 8, 12, 24]))
    scaled = {k: c * v for k, v in sol.rho.items()}
    E = 1.57
    xs = np.linspace(E - 1, 1, 501)
    base, other = evaluate_G(kappa, sol.rho, E, xs), evaluate_G(kappa, scaled, E, xs)
    assert np.argmin(base) == np.argmin(other)
    assert np.array_equal(np.sign(base), np.sign(other))


def test_validate_sigma_kappa3_band5():
    verdict = validate_sigma(SigmaPlan(3, 5, range(3, 31, 3)))
    assert verdict.valid and verdict.min_value > 0
