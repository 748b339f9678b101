"""Band endpoints E_n in J_2(kappa) from the Chebyshev chain system.

For an energy E the chain starts at X_0 = E - 1 and advances with
:func:`~threshold_lab.chebyshev.branch_step`.  The endpoint E_n is the energy
at which the chain closes after n interior points: the middle point equals
E/2 for odd n, or the middle pair straddles the fixed point cos(pi/kappa)
for even n.
"""

from __future__ import annotations

import functools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .chebyshev import branch_step
from .exceptions import DegenerateInput, NonConvergence, NoRoot, OutOfBranch

SCAN_SAMPLES = 4096
# bands above this are bracketed geometrically in the gap E - inf J_2
UNIFORM_SCAN_MAX_N = 100
# bands above this are refined with an extended-precision chain
EXTENDED_PRECISION_MIN_N = 2000
EXTENDED_BITS = 128


@dataclass(frozen=True)
class BandWindow:
    """The energy window J_2(kappa) = (2 cos(pi/kappa), 1 + cos(pi/kappa))."""

    kappa: int

    def __post_init__(self):
        if self.kappa < 2:
            raise ValueError(f"kappa must be >= 2, got {self.kappa}")

    @property
    def lower(self) -> float:
        return 2.0 * math.cos(math.pi / self.kappa)

    @property
    def upper(self) -> float:
        return 1.0 + math.cos(math.pi / self.kappa)

    def contains(self, E: float, closed: bool = True) -> bool:
        if closed:
            return self.lower <= E <= self.upper
        return self.lower < E < self.upper


@dataclass(frozen=True)
class ChainSolution:
    kappa: int
    n: int
    E: float
    X: tuple[float, ...]

    def symmetry_defect(self) -> float:
        """Largest deviation from X_{n+1-i} = E - X_i."""
        X = self.X
        return max(abs(X[self.n + 1 - i] - (self.E - X[i])) for i in range(len(X)))


@dataclass(frozen=True)
class RateFit:
    kappa: int
    indices: tuple[int, ...]
    gaps: tuple[float, ...] = field(repr=False)
    slope: float
    intercept: float
    residual_norm: float


def _half_steps(n: int) -> int:
    """Number of branch steps from X_0 to the closure point."""
    return (n + 1) // 2 if n % 2 else n // 2


def _closure_target(kappa: int, n: int, E, ctx=math):
    return E / 2 if n % 2 else ctx.cos(ctx.pi / kappa)


def _walk_last(kappa: int, E, steps: int, ctx=math):
    x = E - 1
    for _ in range(steps):
        x = branch_step(kappa, E, x, ctx)
    return x


def chain_points(kappa: int, n: int, E: float) -> list[float]:
    """Lower half X_0 .. X_ceil((n+1)/2) of the chain at energy E.

    The upper half follows from the symmetry X_{n+1-i} = E - X_i.  Raises
    :class:`OutOfBranch` if the chain cannot be continued.
    """
    if n < 0:
        raise ValueError(f"band index must be >= 0, got {n}")
    steps = (n + 2) // 2
    pts = [E - 1.0]
    for _ in range(steps):
        pts.append(branch_step(kappa, E, pts[-1]))
    return pts


def closure_residual(kappa: int, n: int, E, ctx=math):
    """Signed closure defect of the band-n chain at energy E.

    ``X_{(n+1)/2} - E/2`` for odd n and ``X_{n/2} - cos(pi/kappa)`` for even
    n; zero exactly at E = E_n.
    """
    x = _walk_last(kappa, E, _half_steps(n), ctx)
    return x - _closure_target(kappa, n, E, ctx)


def _signed_residual(kappa: int, n: int, E, ctx=math):
    # an overshooting chain means E is too large: count it as positive
    try:
        return closure_residual(kappa, n, E, ctx)
    except OutOfBranch:
        return math.inf


def _bisect(f, a: float, b: float, fa: float, tol: float, max_iter: int = 200):
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if m in (a, b):
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    fa_abs, fb_abs = abs(f(a)), abs(f(b))
    return a if fa_abs <= fb_abs else b


def illinois(f, a, b, fa, fb, xtol, ftol, max_iter=200):
    """Bracketed root of f by the Illinois variant of regula falsi.

    Works with floats or mpmath numbers.  Raises :class:`NonConvergence` if
    neither tolerance is met within ``max_iter`` evaluations.
    """
    if fa * fb > 0:
        raise NonConvergence("root is not bracketed")
    for _ in range(max_iter):
        c = (a * fb - b * fa) / (fb - fa)
        fc = f(c)
        if abs(fc) < ftol:
            return c
        if fc * fb < 0:
            a, fa = b, fb
        else:
            fa = fa / 2
        b, fb = c, fc
        if abs(b - a) < xtol:
            return c
    raise NonConvergence(f"Illinois iteration stalled after {max_iter} steps")


def full_chain(kappa: int, n: int, E: float) -> tuple[float, ...]:
    """All chain points X_0 .. X_{n+1}, upper half by symmetry.

    The closure point is pinned to its exact target (E/2 or cos(pi/kappa));
    at a root the walked value differs from it only by the residual.
    """
    if n == 0:
        return (E - 1.0, 1.0)
    lower = [E - 1.0]
    for _ in range(_half_steps(n)):
        lower.append(branch_step(kappa, E, lower[-1]))
    lower[-1] = _closure_target(kappa, n, E)
    X = [0.0] * (n + 2)
    for i, x in enumerate(lower):
        X[i] = x
        if n + 1 - i != i:
            X[n + 1 - i] = E - x
    X[n + 1] = 1.0
    return tuple(X)


def _is_increasing(X) -> bool:
    return all(b > a for a, b in zip(X, X[1:]))


def _residual_grid(kappa: int, n: int, grid: np.ndarray) -> np.ndarray:
    """Vectorized :func:`_signed_residual` over an array of energies."""
    x = grid - 1.0
    dead = np.zeros(grid.shape, dtype=bool)
    with np.errstate(invalid="ignore"):
        for _ in range(_half_steps(n)):
            dead |= ~((x >= -1.0) & (x <= 1.0))
            angle = 2 * math.pi / kappa - np.arccos(np.clip(x, -1.0, 1.0))
            dead |= ~((angle >= 0.0) & (angle <= math.pi))
            x = grid - np.cos(angle)
    target = grid / 2 if n % 2 else math.cos(math.pi / kappa)
    return np.where(dead, math.inf, x - target)


def _scan_roots(kappa: int, n: int, tol: float) -> list[float]:
    window = BandWindow(kappa)
    grid = np.linspace(window.lower, window.upper, SCAN_SAMPLES)
    values = _residual_grid(kappa, n, grid).tolist()
    f = lambda E: _signed_residual(kappa, n, E)  # noqa: E731
    roots = []
    for i in range(len(grid) - 1):
        va, vb = values[i], values[i + 1]
        if va == 0.0:
            roots.append(float(grid[i]))
            continue
        if math.isinf(va) and math.isinf(vb):
            continue
        if (va < 0) != (vb < 0):
            root = _bisect(f, float(grid[i]), float(grid[i + 1]), va, tol)
            # discard jumps into the overshoot region
            if abs(f(root)) < tol:
                roots.append(root)
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def endpoint_gap(kappa: int, n: int):
    """E_n - 2 cos(pi/kappa) for large n.

    Brackets the root geometrically in the gap, then, for
    n > EXTENDED_PRECISION_MIN_N, refines with a 128-bit chain.  Returns a
    float, or an mpmath number when extended precision was used.
    """
    window = BandWindow(kappa)
    lower = window.lower
    f = lambda g: _signed_residual(kappa, n, lower + g)  # noqa: E731
    a, b = 1e-15, window.upper - lower
    if not (f(a) < 0 < f(b)):
        raise NoRoot(f"no closure root bracketed for kappa={kappa}, n={n}")
    for _ in range(400):
        m = math.sqrt(a * b)
        if f(m) < 0:
            a = m
        else:
            b = m
        if b / a - 1.0 < 1e-14:
            break
    gap = math.sqrt(a * b)
    if n <= EXTENDED_PRECISION_MIN_N:
        return gap
    with mp.workprec(EXTENDED_BITS):
        lo = 2 * mp.cos(mp.pi / kappa)
        fm = lambda g: _signed_residual(kappa, n, lo + g, mp)  # noqa: E731
        width = mp.mpf(1e-7)
        ga, gb = mp.mpf(gap) * (1 - width), mp.mpf(gap) * (1 + width)
        fa, fb = fm(ga), fm(gb)
        for _ in range(20):
            if fa < 0 < fb:
                break
            width *= 4
            ga, gb = mp.mpf(gap) * (1 - width), mp.mpf(gap) * (1 + width)
            fa, fb = fm(ga), fm(gb)
        else:
            raise NonConvergence(f"extended-precision bracket failed for n={n}")
        root = illinois(fm, ga, gb, fa, fb, xtol=mp.mpf(gap) * mp.mpf(10) ** -20,
                        ftol=mp.mpf(2) ** -100)
        return +root


@functools.lru_cache(maxsize=512)
def solve_band_endpoint(kappa: int, n: int, tol: float = 1e-12) -> ChainSolution:
    """Band endpoint E_n with its chain points.

    n = 0 returns the closed form 1 + cos(pi/kappa).  Small n scan J_2 with
    ``SCAN_SAMPLES`` points for sign changes of the closure residual and
    bisect; large n bracket geometrically towards inf J_2.  Raises
    :class:`NoRoot` when no admissible root exists.
    """
    if kappa < 2:
        raise ValueError(f"kappa must be >= 2, got {kappa}")
    if n < 0:
        raise ValueError(f"band index must be >= 0, got {n}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    window = BandWindow(kappa)
    if n == 0:
        E = window.upper
        return ChainSolution(kappa, 0, E, full_chain(kappa, 0, E))

    if n > UNIFORM_SCAN_MAX_N:
        E = float(window.lower + endpoint_gap(kappa, n))
        return ChainSolution(kappa, n, E, full_chain(kappa, n, E))

    candidates = []
    for E in _scan_roots(kappa, n, tol):
        try:
            X = full_chain(kappa, n, E)
        except OutOfBranch:
            continue
        if _is_increasing(X) and window.contains(E):
            candidates.append(ChainSolution(kappa, n, E, X))
    if not candidates:
        raise NoRoot(f"no closure root in J_2 for kappa={kappa}, n={n}")
    if len(candidates) > 1:
        previous = solve_band_endpoint(kappa, n - 1, tol).E
        candidates = [c for c in candidates if c.E < previous] or candidates
        candidates.sort(key=lambda c: -c.E)
    return candidates[0]


def band_sequence(kappa: int, n_max: int, tol: float = 1e-12) -> list[ChainSolution]:
    """E_0 > E_1 > ... > E_{n_max} with their chains."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    seq = [solve_band_endpoint(kappa, n, tol) for n in range(n_max + 1)]
    for prev, cur in zip(seq, seq[1:]):
        if not cur.E < prev.E:
            raise NoRoot(f"band endpoints not decreasing at n={cur.n} for kappa={kappa}")
    return seq


def worker_count() -> int:
    """Process count for sweeps, capped by THRESHOLD_LAB_THREADS."""
    cap = os.environ.get("THRESHOLD_LAB_THREADS")
    cpus = os.cpu_count() or 1
    if cap:
        return max(1, min(int(cap), cpus))
    return cpus


def _gap_task(args):
    kappa, n = args
    return endpoint_gap(kappa, n)


def rate_fit(kappa: int, indices) -> RateFit:
    """Least-squares line through (log n, log(E_{2n} - 2 cos(pi/kappa))).

    Raises :class:`DegenerateInput` for empty or non-positive indices and for
    a non-positive gap.
    """
    indices = tuple(int(i) for i in indices)
    if not indices:
        raise DegenerateInput("indices must be nonempty")
    if min(indices) < 1:
        raise DegenerateInput("indices must be >= 1")
    if len(set(indices)) < 2:
        raise DegenerateInput("need at least two distinct indices for a slope")
    tasks = [(kappa, 2 * n) for n in indices]
    workers = min(worker_count(), len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            gaps = list(pool.map(_gap_task, tasks))
    else:
        gaps = [_gap_task(t) for t in tasks]
    for n, gap in zip(indices, gaps):
        if gap <= 0:
            raise DegenerateInput(f"non-positive gap at n={n}")
    x = np.log(np.array(indices, dtype=float))
    y = np.array([float(mp.log(g)) for g in gaps])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.linalg.norm(A @ np.array([slope, intercept]) - y))
    return RateFit(kappa, indices, tuple(float(g) for g in gaps),
                   float(slope), float(intercept), resid)
