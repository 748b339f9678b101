"""Extended-precision band endpoints and integer-relation minimal polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from .bands import _signed_residual, illinois, solve_band_endpoint
from .exceptions import NoRelation, NonConvergence

DEFAULT_BITS = 512


@dataclass(frozen=True)
class MinPolyResult:
    coefficients: tuple[int, ...]  # ascending degree
    degree: int
    residual: float
    field: str = "rational"


def refine_endpoint(kappa: int, n: int, bits: int = 256):
    """E_n to ``bits`` binary digits, seeded from the double-precision solver."""
    if bits < 64:
        raise ValueError("bits must be >= 64")
    seed = solve_band_endpoint(kappa, n).E
    work = bits + 32
    with mp.workprec(work):
        if n == 0:
            return 1 + mp.cos(mp.pi / kappa)
        f = lambda E: _signed_residual(kappa, n, E, mp)  # noqa: E731
        delta = mp.mpf(1e-11)
        for _ in range(30):
            a, b = mp.mpf(seed) - delta, mp.mpf(seed) + delta
            fa, fb = f(a), f(b)
            if fa < 0 < fb and mp.isfinite(fb):
                break
            delta *= 4
        else:
            raise NonConvergence(f"could not bracket E_{n} for kappa={kappa}")
        target = mp.mpf(2) ** (-bits + 8)
        E = illinois(f, a, b, fa, fb, xtol=mp.mpf(2) ** (-work + 4), ftol=target / 256,
                     max_iter=4 * work)
        if abs(f(E)) >= target:
            raise NonConvergence(f"residual {mp.nstr(f(E), 5)} above 2^-{bits - 8}")
        if abs(E - seed) > 1e-9:
            raise NonConvergence("refined root drifted away from the seed")
        return +E


def _eval_poly(coeffs, value):
    acc = mp.mpf(0)
    for c in reversed(coeffs):
        acc = acc * value + c
    return acc


def _scale(coeffs, value):
    return sum(abs(mp.mpf(c)) * abs(value) ** i for i, c in enumerate(coeffs))


def _normalize(coeffs: list[int]) -> tuple[int, ...]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    g = 0
    for c in coeffs:
        g = math.gcd(g, c)
    coeffs = [c // g for c in coeffs]
    if coeffs[-1] < 0:
        coeffs = [-c for c in coeffs]
    return tuple(coeffs)


def find_min_poly(value, max_degree: int = 8, bits: int = DEFAULT_BITS) -> MinPolyResult:
    """Lowest-degree primitive integer polynomial vanishing at ``value``.

    For each degree d the lattice spanned by the rows
    ``[e_i | round(2^bits * value^i)]``, i = 0..d, is LLL-reduced.  A reduced
    row is accepted only if its coefficients spend at most bits/2 binary
    digits in total, (d+1) log2(max |a_i|) <= bits/2, while the polynomial
    cancels at least 3 bits/4 digits relative to the sum of its absolute
    terms and stays below 2^(-bits/2) absolutely.  Lattice noise cannot meet
    both: a random relation with that coefficient budget only cancels about
    bits/2 digits.  Raises :class:`NoRelation` if nothing qualifies up to
    ``max_degree``.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    with mp.workprec(bits + 32):
        v = mp.mpf(value)
        big = mp.mpf(2) ** bits
        absolute = mp.mpf(2) ** (-bits // 2)
        relative = mp.mpf(2) ** (-(3 * bits) // 4)
        powers = [v**i for i in range(max_degree + 1)]
        for d in range(1, max_degree + 1):
            rows = [
                [1 if j == i else 0 for j in range(d + 1)] + [int(mp.nint(big * powers[i]))]
                for i in range(d + 1)
            ]
            reduced = DomainMatrix(rows, (d + 1, d + 2), ZZ).lll().to_Matrix().tolist()
            best = None
            for row in reduced:
                coeffs = [int(c) for c in row[:-1]]
                if not any(coeffs) or coeffs[-1] == 0:
                    continue
                height = max(abs(c) for c in coeffs)
                if (d + 1) * math.log2(height) > bits / 2:
                    continue
                residual = abs(_eval_poly(coeffs, v))
                if residual <= absolute and residual <= relative * _scale(coeffs, v):
                    if best is None or residual < best[1]:
                        best = (coeffs, residual)
            if best is not None:
                coeffs = _normalize(best[0])
                residual = abs(_eval_poly(coeffs, v))
                return MinPolyResult(coeffs, len(coeffs) - 1, float(residual))
    raise NoRelation(f"no integer relation up to degree {max_degree} at {bits} bits")


def _coerce(c, sqrt2):
    if isinstance(c, tuple):
        a, b = c
        return _coerce(a, sqrt2) + _coerce(b, sqrt2) * sqrt2
    if isinstance(c, Fraction):
        return mp.mpf(c.numerator) / c.denominator
    if isinstance(c, str):
        return _coerce(Fraction(c), sqrt2)
    return mp.mpf(c)


def verify_poly_root(coefficients: Sequence, value, bits: int = DEFAULT_BITS):
    """|p(value)| for ascending coefficients.

    Coefficients may be ints, Fractions, rational strings such as ``"1/4"``,
    or pairs ``(a, b)`` standing for a + b*sqrt(2).
    """
    with mp.workprec(bits + 32):
        sqrt2 = mp.sqrt(2)
        coeffs = [_coerce(c, sqrt2) for c in coefficients]
        return abs(_eval_poly(coeffs, mp.mpf(value)))


def rational_roots(coefficients: Sequence[int]) -> list[Fraction]:
    """Rational roots of an integer polynomial by the rational root test."""
    coeffs = list(coefficients)
    roots = []
    while coeffs and coeffs[0] == 0:
        roots.append(Fraction(0))
        coeffs.pop(0)
    if len(coeffs) < 2:
        return roots
    a0, an = abs(coeffs[0]), abs(coeffs[-1])
    cands = {Fraction(s * p, q) for p in _divisors(a0) for q in _divisors(an) for s in (1, -1)}
    for r in sorted(cands):
        if sum(Fraction(c) * r**i for i, c in enumerate(coeffs)) == 0:
            roots.append(r)
    return roots


def _divisors(m: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(m) + 1) if m % d == 0]
    return sorted(set(small + [m // d for d in small]))


def sqrt2_norm(pairs: Sequence[tuple]) -> tuple[int, ...]:
    """Primitive integer polynomial A^2 - 2 B^2 for p = A + sqrt(2) B.

    ``pairs`` holds ascending coefficients (a_i, b_i) meaning a_i + b_i sqrt(2).
    """
    A = [Fraction(a) for a, _ in pairs]
    B = [Fraction(b) for _, b in pairs]

    def mul(p, q):
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, x in enumerate(p):
            for j, y in enumerate(q):
                out[i + j] += x * y
        return out

    norm = [x - 2 * y for x, y in zip(mul(A, A), mul(B, B))]
    lcm = 1
    for c in norm:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    return _normalize([int(c * lcm) for c in norm])
