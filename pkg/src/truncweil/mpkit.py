"""Arbitrary-precision numeric primitives.

Each PrecisionContext owns a private mpmath context, so no global precision
state is touched.  Values produced under a context are mpf/mpc numbers of
that context at the working precision (dps plus guard digits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath
from mpmath.libmp import from_man_exp, to_fixed

GUARD_DIGITS = 12

_MP_CONTEXTS: dict[int, mpmath.ctx_mp.MPContext] = {}


def _mp_for(work_dps: int):
    mp = _MP_CONTEXTS.get(work_dps)
    if mp is None:
        mp = mpmath.MPContext()
        mp.dps = work_dps
        mp = _MP_CONTEXTS.setdefault(work_dps, mp)
    return mp


@dataclass(frozen=True)
class PrecisionContext:
    """Target decimal precision ``dps``; arithmetic runs at ``dps + guard``."""

    dps: int
    guard: int = GUARD_DIGITS

    @property
    def work_dps(self) -> int:
        return self.dps + self.guard

    @property
    def mp(self):
        return _mp_for(self.work_dps)

    @property
    def prec(self) -> int:
        """Working precision in bits (also the fixed-point scale)."""
        return self.mp.prec

    @property
    def eps(self):
        return self.mp.mpf(10) ** (-self.dps)

    @property
    def work_eps(self):
        return self.mp.mpf(10) ** (-self.work_dps)

    def mpf(self, x):
        return self.mp.mpf(x)

    def to_fixed(self, x) -> int:
        """Floor of x * 2**prec as a Python int."""
        return to_fixed(self.mp.mpf(x)._mpf_, self.prec)

    def from_fixed(self, m: int):
        """m * 2**-prec rounded to working precision (|m| may exceed 2**prec)."""
        return self.mp.make_mpf(from_man_exp(m, -self.prec, self.prec, "n"))

    def nstr(self, x, digits: int | None = None) -> str:
        """Decimal string that parses back to the identical binary value."""
        if digits is None:
            digits = mpmath.libmp.repr_dps(self.prec)
        return mpmath.libmp.to_str(self.mp.mpf(x)._mpf_, digits)


def make_context(dps: int) -> PrecisionContext:
    if not isinstance(dps, int) or dps < 30:
        raise ValueError("dps must be an integer >= 30, got %r" % (dps,))
    return PrecisionContext(dps)


# ---------------------------------------------------------------------------
# digamma

_BERNOULLI: dict[int, list] = {}


def _stirling_coeffs(mp, count: int) -> list:
    """B_{2k} / (2k) for k = 1..count at the precision of ``mp``."""
    coeffs = _BERNOULLI.get(mp.prec)
    if coeffs is None:
        coeffs = []
        _BERNOULLI[mp.prec] = coeffs
    while len(coeffs) < count:
        k = len(coeffs) + 1
        p, q = mpmath.libmp.bernfrac(2 * k)
        coeffs.append(mp.mpf(p) / (q * 2 * k))
    return coeffs


def digamma_complex(z, ctx: PrecisionContext):
    """Complex digamma by upward recurrence followed by the Stirling series."""
    mp = ctx.mp
    z = mp.mpc(z)
    if z.imag == 0 and z.real <= 0 and z.real == int(z.real):
        raise ValueError("digamma has a pole at %s" % mp.nstr(z.real, 5))
    radius = max(10, 0.4 * ctx.work_dps)
    r2 = radius * radius
    acc = mp.mpc(0)
    # shift into the right half-plane as well, where the series is valid
    while z.real < 0 or z.real * z.real + z.imag * z.imag < r2:
        acc -= 1 / z
        z += 1
    res = mp.log(z) - 1 / (2 * z)
    w = 1 / (z * z)
    term = w
    tiny = ctx.work_eps * abs(res)
    k = 0
    # terms decrease until k ~ pi*|z|, far beyond the point where they drop below eps
    budget = int(math.pi * radius) + 10
    coeffs = _stirling_coeffs(mp, budget)
    while k < budget:
        t = coeffs[k] * term
        res -= t
        if abs(t) < tiny:
            break
        term *= w
        k += 1
    return res + acc


# ---------------------------------------------------------------------------
# oscillatory kernel


def taylor_terms(dps: int) -> int:
    if dps <= 80:
        return 5
    if dps <= 150:
        return 7
    return -(-7 * dps // 150)


def stable_phase_integral(beta, L, ctx: PrecisionContext):
    """(exp(i*beta*L) - 1) / (i*beta), free of cancellation near beta = 0."""
    mp = ctx.mp
    beta = mp.mpf(beta)
    L = mp.mpf(L)
    if L <= 0:
        raise ValueError("L must be positive")
    x = beta * L
    if abs(x) < mp.mpf(10) ** (-ctx.dps / 4.0):
        # sum_k (i x)^k L / (k+1)!
        re = mp.mpf(0)
        im = mp.mpf(0)
        term = L
        for k in range(taylor_terms(ctx.dps)):
            term_k = term / (k + 1)
            r = k % 4
            if r == 0:
                re += term_k
            elif r == 1:
                im += term_k
            elif r == 2:
                re -= term_k
            else:
                im -= term_k
            term = term_k * x
        return mp.mpc(re, im)
    return split_phase_integral(beta, L, ctx)


def split_phase_integral(beta, L, ctx: PrecisionContext):
    """sin(beta L)/beta + i 2 sin^2(beta L/2)/beta; needs beta != 0."""
    mp = ctx.mp
    beta = mp.mpf(beta)
    x = beta * mp.mpf(L)
    half = mp.sin(x / 2)
    return mp.mpc(mp.sin(x) / beta, 2 * half * half / beta)


# ---------------------------------------------------------------------------
# tanh-sinh quadrature


@dataclass(frozen=True)
class QuadratureGrid:
    level: int
    abscissae: tuple
    weights: tuple
    interval: tuple

    @property
    def nodes(self) -> list:
        return list(zip(self.abscissae, self.weights))

    def __len__(self) -> int:
        return len(self.abscissae)


_GRIDS: dict[tuple, QuadratureGrid] = {}


def _tmax(work_dps: int) -> float:
    # beyond this the double-exponential weights fall below 10**(-1.1*work_dps)
    return math.asinh(1.1 * work_dps * math.log(10) / math.pi)


def build_grid(a, b, level: int, ctx: PrecisionContext) -> QuadratureGrid:
    """Tanh-sinh nodes on (a, b) from 2**level + 1 equally spaced t-points.

    Nodes at level + 1 contain those at level exactly (fixed t-range).
    Weights are normalised to sum to b - a.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    mp = ctx.mp
    a = mp.mpf(a)
    b = mp.mpf(b)
    if not a < b:
        raise ValueError("need a < b")
    key = (a._mpf_, b._mpf_, level, ctx.work_dps)
    grid = _GRIDS.get(key)
    if grid is not None:
        return grid
    width = b - a
    half_pi = mp.pi / 2
    h = mp.mpf(_tmax(ctx.work_dps)) / 2 ** (level - 1)
    cut = width * mp.mpf(10) ** (-ctx.work_dps - 5)
    xs = []
    ws = []
    K = 2 ** (level - 1)
    for k in range(-K, K + 1):
        t = k * h
        u = half_pi * mp.sinh(t)
        ch = mp.cosh(u)
        w = width / 2 * h * half_pi * mp.cosh(t) / (ch * ch)
        if w < cut:
            continue
        if k < 0:
            x = a + width / (1 + mp.exp(-2 * u))
        else:
            x = b - width / (1 + mp.exp(2 * u))
        if not (a < x < b):
            continue
        xs.append(x)
        ws.append(w)
    # rescale so constants integrate exactly at every level; at converged
    # levels the factor differs from 1 by less than the working precision
    scale = width / mp.fsum(ws)
    ws = [w * scale for w in ws]
    grid = QuadratureGrid(level, tuple(xs), tuple(ws), (a, b))
    _GRIDS[key] = grid
    return grid


def integrate_on_grid(values: Sequence, grid: QuadratureGrid):
    if len(values) != len(grid.weights):
        raise ValueError("got %d values for %d nodes" % (len(values), len(grid.weights)))
    mp = grid.weights[0].context
    return mp.fsum(v * w for v, w in zip(values, grid.weights))


def calibrate_level(
    estimate: Callable[[QuadratureGrid], Sequence],
    a,
    b,
    ctx: PrecisionContext,
    start: int = 6,
    max_level: int = 18,
    tol=None,
) -> int:
    """Smallest level whose estimates agree with the previous level.

    ``estimate(grid)`` returns a sequence of integrals.  The returned level
    is the finer of the first pair that agrees to ``tol`` (default
    10**(-dps+10), relative to max(1, |I|)).
    """
    mp = ctx.mp
    if tol is None:
        tol = mp.mpf(10) ** (-ctx.dps + 10)
    prev = list(estimate(build_grid(a, b, start, ctx)))
    for level in range(start + 1, max_level + 1):
        cur = list(estimate(build_grid(a, b, level, ctx)))
        ok = all(abs(x - y) <= tol * max(1, abs(y)) for x, y in zip(prev, cur))
        if ok:
            return level
        prev = cur
    raise RuntimeError("quadrature did not settle by level %d" % max_level)


# ---------------------------------------------------------------------------
# roots


def scan_sign_changes(f: Callable, a, b, step) -> list:
    """Consecutive-sample sign changes of f on [a, b]; zero counts as positive."""
    if not a < b or not step > 0:
        raise ValueError("need a < b and step > 0")
    n = int(math.floor(float((b - a) / step) + 1e-9))
    xs = [a + k * step for k in range(n + 1)]
    brackets = []
    prev_x = xs[0]
    prev_neg = f(prev_x) < 0
    for x in xs[1:]:
        neg = f(x) < 0
        if neg != prev_neg:
            brackets.append((prev_x, x))
        prev_x, prev_neg = x, neg
    return brackets


def refine_root(f: Callable, bracket, tol, ctx: PrecisionContext):
    """Bracketed root by Illinois false position with bisection safeguard.

    Iterates until the bracket is no wider than ``tol``, or than a few units
    in the last place of the working precision when ``tol`` is finer.
    """
    mp = ctx.mp
    lo = mp.mpf(bracket[0])
    hi = mp.mpf(bracket[1])
    if lo > hi:
        lo, hi = hi, lo
    flo = f(lo)
    fhi = f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo < 0) == (fhi < 0):
        raise ValueError("interval does not bracket a sign change")
    floor_tol = 8 * ctx.work_eps * max(abs(lo), abs(hi), 1)
    tol = max(mp.mpf(tol), floor_tol)
    side = 0
    checkpoint = hi - lo
    steps = 0
    for _ in range(100000):
        if hi - lo <= tol:
            break
        steps += 1
        bisect = steps >= 3 and hi - lo > checkpoint / 2
        if not bisect:
            x = hi - fhi * (hi - lo) / (fhi - flo)
            bisect = not (lo < x < hi)
        if bisect:
            x = (lo + hi) / 2
        fx = f(x)
        if fx == 0:
            return x
        if (fx < 0) == (flo < 0):
            lo, flo = x, fx
            if side == -1 and not bisect:
                fhi /= 2
            side = -1
        else:
            hi, fhi = x, fx
            if side == 1 and not bisect:
                flo /= 2
            side = 1
        if bisect or steps >= 3:
            checkpoint = hi - lo
            steps = 0
            side = 0 if bisect else side
    else:
        raise RuntimeError("root refinement did not converge")
    return lo if abs(flo) <= abs(fhi) else hi
