"""Chebyshev polynomials of the first and second kind.

Values are computed from the trigonometric closed form inside (-1, 1) and
from the three-term recurrence near and beyond the endpoints, where
``sin(arccos x)`` vanishes.  Every function accepts scalars or numpy arrays;
scalar input gives a Python float back.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import OutOfBranch

# |x| above 1 - _EDGE switches to the recurrence
_EDGE = 1e-8
# |x^2 - 1| below this uses the differentiated recurrence for U'
_DERIV_EDGE = 1e-2


def _check_degree(n: int) -> None:
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")


def _as_output(out: np.ndarray, scalar: bool):
    return float(out) if scalar else out


def _recur_T(n: int, x: np.ndarray) -> np.ndarray:
    prev, cur = np.ones_like(x), x.copy()
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def _recur_U(n: int, x: np.ndarray) -> np.ndarray:
    prev, cur = np.ones_like(x), 2.0 * x
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def _recur_dU(n: int, x: np.ndarray) -> np.ndarray:
    # d/dx of U_{k+1} = 2x U_k - U_{k-1}
    u_prev, u_cur = np.ones_like(x), 2.0 * x
    d_prev, d_cur = np.zeros_like(x), np.full_like(x, 2.0)
    if n == 0:
        return d_prev
    for _ in range(n - 1):
        u_prev, u_cur, d_prev, d_cur = (
            u_cur,
            2.0 * x * u_cur - u_prev,
            d_cur,
            2.0 * u_cur + 2.0 * x * d_cur - d_prev,
        )
    return d_cur


def _scalar_recur(n: int, x: float, first: float) -> float:
    prev, cur = 1.0, first
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def _scalar_T(n: int, x: float) -> float:
    if abs(x) <= 1.0 - _EDGE:
        return math.cos(n * math.acos(x))
    return _scalar_recur(n, x, x)


def _scalar_U(n: int, x: float) -> float:
    if abs(x) <= 1.0 - _EDGE:
        theta = math.acos(x)
        return math.sin((n + 1) * theta) / math.sin(theta)
    return _scalar_recur(n, x, 2.0 * x)


def cheb_T(n: int, x):
    """Chebyshev polynomial of the first kind, T_n(x)."""
    _check_degree(n)
    if isinstance(x, (float, int)):
        return _scalar_T(n, float(x))
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    inner = np.abs(x) <= 1.0 - _EDGE
    out[inner] = np.cos(n * np.arccos(x[inner]))
    out[~inner] = _recur_T(n, x[~inner])
    return _as_output(out[0] if scalar else out, scalar)


def cheb_U(n: int, x):
    """Chebyshev polynomial of the second kind, U_n(x)."""
    _check_degree(n)
    if isinstance(x, (float, int)):
        return _scalar_U(n, float(x))
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    inner = np.abs(x) <= 1.0 - _EDGE
    theta = np.arccos(x[inner])
    out[inner] = np.sin((n + 1) * theta) / np.sin(theta)
    out[~inner] = _recur_U(n, x[~inner])
    return _as_output(out[0] if scalar else out, scalar)


def cheb_U_deriv(n: int, x):
    """Derivative dU_n/dx.

    Uses ``U'_n = ((n+1) T_{n+1} - x U_n) / (x^2 - 1)`` away from the
    endpoints, the differentiated recurrence close to them, and the exact
    limit ``(+-1)^(n+1) n (n+1) (n+2) / 3`` at x = +-1.
    """
    _check_degree(n)
    if isinstance(x, (float, int)) and x * x - 1.0 != 0.0 and abs(x * x - 1.0) >= _DERIV_EDGE:
        x = float(x)
        return ((n + 1) * _scalar_T(n + 1, x) - x * _scalar_U(n, x)) / (x * x - 1.0)
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    gap = x * x - 1.0
    far = np.abs(gap) >= _DERIV_EDGE
    xf = x[far]
    out[far] = ((n + 1) * cheb_T(n + 1, xf) - xf * cheb_U(n, xf)) / gap[far]
    near = ~far
    out[near] = _recur_dU(n, x[near])
    limit = n * (n + 1) * (n + 2) / 3.0
    out[x == 1.0] = limit
    out[x == -1.0] = limit * (-1.0) ** (n + 1)
    return _as_output(out[0] if scalar else out, scalar)


def branch_step(kappa: int, E, x, ctx=math):
    """Next chain point on the T_kappa level set.

    Returns ``Y = E - cos(2 pi / kappa - arccos x)``, which satisfies
    ``T_kappa(x) = T_kappa(E - Y)``.  Raises :class:`OutOfBranch` when
    ``|x| > 1`` or the angle ``2 pi / kappa - arccos x`` leaves [0, pi].

    ``ctx`` supplies ``pi``, ``acos`` and ``cos``; pass ``mpmath.mp`` to step
    in extended precision.
    """
    if kappa < 2:
        raise ValueError("kappa must be >= 2")
    if not -1 <= x <= 1:
        raise OutOfBranch(f"chain point {x!r} outside [-1, 1]")
    angle = 2 * ctx.pi / kappa - ctx.acos(x)
    if not 0 <= angle <= ctx.pi:
        raise OutOfBranch(f"branch angle {angle!r} outside [0, pi]")
    return E - ctx.cos(angle)


def bezout_bracket(f, g, x, y):
    """Two-point Bezoutian ``f(x) g(y) - f(y) g(x)``."""
    return f(x) * g(y) - f(y) * g(x)
