from fractions import Fraction

import mpmath as mp
import pytest

from threshold_lab.exceptions import NoRelation
from threshold_lab.highprec import (find_min_poly, rational_roots, refine_endpoint, sqrt2_norm,
                                    verify_poly_root)
from threshold_lab.refdata import MINIMAL_POLYNOMIALS, SQRT2_POLYNOMIALS


def test_refine_endpoint_rational():
    with mp.workprec(300):
        assert abs(refine_endpoint(4, 1, 256) - mp.mpf(8) / 5) < mp.mpf(2) ** -250


@pytest.mark.parametrize("kappa,n,approx", [(3, 5, 1.11207), (4, 5, 1.47650)])
def test_refine_endpoint_decimals(kappa, n, approx):
    assert float(refine_endpoint(kappa, n, 256)) == pytest.approx(approx, abs=1e-5)


def test_refine_endpoint_closed_form():
    with mp.workprec(300):
        exact = (2 + mp.sqrt(2) + mp.sqrt(2 + 4 * mp.sqrt(2))) / 4
        assert abs(refine_endpoint(4, 2, 256) - exact) < mp.mpf(2) ** -240


def test_refine_endpoint_bits_validated():
    with pytest.raises(ValueError):
        refine_endpoint(4, 1, 16)


@pytest.mark.parametrize("key", [(4, 3), (4, 5), (3, 5)])
def test_find_min_poly_matches_reference(key):
    res = find_min_poly(refine_endpoint(*key, 512), max_degree=8, bits=512)
    assert res.coefficients == MINIMAL_POLYNOMIALS[key]
    assert res.degree == len(MINIMAL_POLYNOMIALS[key]) - 1
    assert res.residual < 2.0 ** -256


def test_find_min_poly_rational_endpoint():
    res = find_min_poly(refine_endpoint(2, 3, 256), bits=256)
    assert res.coefficients == (-2, 5)
    assert rational_roots(res.coefficients) == [Fraction(2, 5)]


def test_find_min_poly_invariants():
    res = find_min_poly(refine_endpoint(3, 2, 256), bits=256)
    import math
    assert res.coefficients[-1] > 0
    assert math.gcd(*res.coefficients) == 1
    # (9 + sqrt 33)/12 is a root of 6E^2 - 9E + 2
    assert res.coefficients == (2, -9, 6)


def test_find_min_poly_no_relation():
    with mp.workprec(300):
        with pytest.raises(NoRelation):
            find_min_poly(mp.pi, max_degree=3, bits=256)


def test_find_min_poly_rejects_bad_degree():
    with pytest.raises(ValueError):
        find_min_poly(mp.mpf(1), max_degree=0)


def test_verify_poly_root_integer():
    r = verify_poly_root([16, -64, 56, -112, 65], refine_endpoint(4, 3, 256), bits=256)
    assert r < 1e-60


@pytest.mark.parametrize("n,bound", [(4, 1e-60), (6, 1e-50)])
def test_verify_poly_root_sqrt2_coefficients(n, bound):
    assert verify_poly_root(SQRT2_POLYNOMIALS[(4, n)], refine_endpoint(4, n, 256), bits=256) < bound


def test_verify_poly_root_accepts_fractions_and_strings():
    with mp.workprec(600):
        value = mp.mpf(2) / 5
    assert verify_poly_root(["-2/5", 1], value) < 1e-100
    assert verify_poly_root([Fraction(-2, 5), 1], value) < 1e-100


def test_sqrt2_norm_simple():
    # (E - sqrt 2)(conjugate) = E^2 - 2
    assert sqrt2_norm([(0, -1), (1, 0)]) == (-2, 0, 1)


def test_sqrt2_norm_vanishes_at_kappa4_n4():
    poly = sqrt2_norm(SQRT2_POLYNOMIALS[(4, 4)])
    assert verify_poly_root(poly, refine_endpoint(4, 4, 256), bits=256) < 1e-60


@pytest.mark.slow
def test_degree_twelve_relation_for_kappa4_n6():
    value = refine_endpoint(4, 6, 1024)
    res = find_min_poly(value, max_degree=12, bits=1024)
    assert res.coefficients == sqrt2_norm(SQRT2_POLYNOMIALS[(4, 6)])
