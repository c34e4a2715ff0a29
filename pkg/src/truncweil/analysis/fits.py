"""Least-squares fits of convergence data.

Linear models are solved exactly from the normal equations in 50-digit
arithmetic.  Nonlinear models use a Nelder-Mead simplex from a fixed,
deterministic lattice of starting points, so repeated runs agree.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy.optimize import minimize

from ..weil_kernel import prime_power_bases
from .dataset import FitResult, SweepDataset, make_fit

PASS_THRESHOLD = 0.5

_LS = mpmath.MPContext()
_LS.dps = 50


def least_squares(columns: Sequence[Sequence], ys: Sequence) -> list:
    """Coefficients minimising |sum_j p_j columns[j] - ys|_2 via the normal equations."""
    mp = _LS
    k = len(columns)
    n = len(ys)
    if n < k + 1:
        raise ValueError("need at least %d points for %d parameters" % (k + 1, k))
    cols = [[mp.mpf(x) for x in col] for col in columns]
    y = [mp.mpf(v) for v in ys]
    A = mp.matrix(k, k)
    b = mp.matrix(k, 1)
    for i in range(k):
        b[i] = mp.fsum(cols[i][t] * y[t] for t in range(n))
        for j in range(i, k):
            A[i, j] = A[j, i] = mp.fsum(cols[i][t] * cols[j][t] for t in range(n))
    scale = max(abs(A[i, i]) for i in range(k))
    if scale == 0 or abs(mp.det(A)) <= scale**k * mp.mpf(10) ** (-40):
        raise ValueError("degenerate design: columns are linearly dependent")
    p = mp.lu_solve(A, b)
    return [p[i] for i in range(k)]


def fit_design(model_id: str, columns, ys, threshold=None) -> FitResult:
    p = least_squares(columns, ys)
    pred = [_LS.fsum(p[j] * _LS.mpf(columns[j][t]) for j in range(len(p))) for t in range(len(ys))]
    return make_fit(model_id, p, [float(v) for v in ys], [float(v) for v in pred], threshold)


def fit_linear_ls(xs: Sequence, ys: Sequence, model_id: str = "linear", threshold=None) -> FitResult:
    """ys ~ slope * xs + intercept; params are (slope, intercept)."""
    if len(xs) != len(ys):
        raise ValueError("xs and ys differ in length")
    if len(xs) < 3:
        raise ValueError("need at least 3 points")
    if all(x == xs[0] for x in xs):
        raise ValueError("degenerate xs: all values equal")
    return fit_design(model_id, [list(xs), [1] * len(xs)], ys, threshold)


# ---------------------------------------------------------------------------
# nonlinear helpers


def multistart_simplex(objective: Callable, starts: Sequence, tol: float = 1e-12, maxiter: int = 20000):
    """Best Nelder-Mead optimum over ``starts`` (ties keep the earliest start)."""
    best = None
    for x0 in starts:
        r = minimize(
            objective,
            np.asarray(x0, dtype=float),
            method="Nelder-Mead",
            options={"xatol": tol, "fatol": tol, "maxiter": maxiter, "maxfev": maxiter},
        )
        if not np.isfinite(r.fun):
            continue
        if best is None or r.fun < best.fun:
            best = r
    if best is None:
        raise RuntimeError("no start produced a finite objective")
    return best


def log_lattice(lo: float, hi: float, n: int) -> list:
    return [float(v) for v in np.geomspace(lo, hi, n)]


# ---------------------------------------------------------------------------
# smooth convergence models


def prime_counts(c: float) -> tuple:
    """(pi(c), theta(c), number of prime powers <= c)."""
    bases = prime_power_bases(int(math.floor(c)))
    primes = [p for n, p in bases if n == p]
    return len(primes), math.fsum(math.log(p) for p in primes), len(bases)


def _m5_fit(Ls, ys, threshold) -> FitResult:
    y = np.asarray(ys, dtype=float)
    x = np.asarray(Ls, dtype=float)

    def sse(q):
        return float(np.sum((y - q[0] * np.exp(q[1] * x)) ** 2))

    sign = -1.0 if np.mean(y) < 0 else 1.0
    starts = [(sign * a, b) for a in log_lattice(1.0, 1000.0, 4) for b in log_lattice(0.1, 3.0, 4)]
    best = multistart_simplex(sse, starts)
    a, b = best.x
    return make_fit("M5", (a, b), list(y), list(a * np.exp(b * x)), threshold)


def fit_models_m1_m8(ds: SweepDataset, threshold: float = PASS_THRESHOLD) -> list:
    """The eight two-parameter smooth models of log10 |gamma_1 error| against c."""
    if len(ds) < 8:
        raise ValueError("need at least 8 rows")
    ys = [r.log10_gamma1_err for r in ds.rows]
    if any(y is None for y in ys):
        raise ValueError("every row needs log10_gamma1_err")
    mp = _LS
    Ls = [mp.log(mp.mpf(r.c)) for r in ds.rows]
    counts = [prime_counts(r.c) for r in ds.rows]
    one = [1] * len(ys)
    out = [
        fit_design("M1", [Ls, one], ys, threshold),
        fit_design("M2", [[L * L for L in Ls], one], ys, threshold),
        fit_design("M3", [[L * mp.log(L) for L in Ls], one], ys, threshold),
        fit_design("M4", [Ls, [mp.log(L) for L in Ls]], ys, threshold),
        _m5_fit([float(L) for L in Ls], ys, threshold),
        fit_design("M6", [[k[0] for k in counts], one], ys, threshold),
        fit_design("M7", [[k[1] for k in counts], one], ys, threshold),
        fit_design("M8", [[k[2] for k in counts], one], ys, threshold),
    ]
    return out


# ---------------------------------------------------------------------------
# log-periodic model


def log_periodic(params, L):
    a, b, A, w, phi = params
    return a * L + b + A * np.sin(w * L + phi)


def _normalise_lp(q) -> tuple:
    a, b, A, w, phi = (float(v) for v in q)
    if A < 0:
        A, phi = -A, phi + math.pi
    return a, b, A, w, phi % (2 * math.pi)


def fit_log_periodic(ds: SweepDataset, omega_range=(0.5, 10.0), starts: int = 16) -> FitResult:
    """aL + b + A sin(wL + phi) by multistart simplex over w.

    Each start fixes w on a log lattice over ``omega_range`` and solves for
    the remaining (linear) coefficients before the 5-parameter polish.
    """
    if len(ds) < 7:
        raise ValueError("need at least 7 rows")
    y = np.asarray([r.log10_gamma1_err for r in ds.rows], dtype=float)
    x = np.asarray([r.L for r in ds.rows], dtype=float)

    def sse(q):
        return float(np.sum((y - log_periodic(q, x)) ** 2))

    seeds = []
    for w in log_lattice(omega_range[0], omega_range[1], starts):
        X = np.column_stack([x, np.ones_like(x), np.sin(w * x), np.cos(w * x)])
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        a, b, s, c = coef
        seeds.append((a, b, math.hypot(s, c), w, math.atan2(c, s)))
    best = multistart_simplex(sse, seeds, tol=1e-12, maxiter=40000)
    q = _normalise_lp(best.x)
    return make_fit("log_periodic", q, list(y), list(log_periodic(q, x)))


def predict_log_periodic(fit: FitResult, c: float) -> float:
    return float(log_periodic(fit.params, math.log(c)))


def blind_test(fit: FitResult, actual: dict, threshold: float = 2.0) -> list:
    """(c, predicted, actual, |residual|, passed) for each held-out cutoff."""
    out = []
    for c in sorted(actual):
        pred = predict_log_periodic(fit, c)
        res = abs(pred - actual[c])
        out.append((c, pred, actual[c], res, res < threshold))
    return out


# ---------------------------------------------------------------------------
# coupling, power law and rate fits


def ratio_coupling_fit(ds: SweepDataset) -> FitResult:
    """|gamma_1 err| / lambda_min as a linear function of L = log c."""
    xs, ys = [], []
    for r in ds.rows:
        if r.lambda_min is None or not r.gamma_errors:
            raise ValueError("rows need lambda_min and the gamma_1 error")
        xs.append(r.L)
        ys.append(float(r.gamma_errors[0] / r.lambda_min))
    return fit_linear_ls(xs, ys, "ratio_coupling")


def log_ratio_coupling(ds: SweepDataset, c1: float, c2: float) -> tuple:
    """(log10 lambda ratio, log10 gamma_1-error ratio, ratio of the two logs)."""
    rows = {r.c: r for r in ds.rows}
    a, b = rows[float(c1)], rows[float(c2)]
    lam = float(mpmath.log10(a.lambda_min / b.lambda_min))
    gam = float(mpmath.log10(a.gamma_errors[0] / b.gamma_errors[0]))
    return lam, gam, lam / gam


def power_law_refit(ds: SweepDataset, keep: Callable | None = None, extra: Sequence = ()) -> tuple:
    """|log10 lambda_min| ~ A c**B; returns (A, B, rms).

    The fit is a least-squares line in (log c, log |log10 lambda|); the rms
    is of the untransformed residuals.  ``extra`` appends (c, log10 lambda)
    pairs not present in ``ds``.
    """
    rows = [r for r in ds.rows if keep is None or keep(r)]
    pts = [(r.c, abs(r.log10_lambda)) for r in rows] + [(c, abs(v)) for c, v in extra]
    if len(pts) < 3:
        raise ValueError("need at least 3 rows")
    fit = fit_linear_ls([math.log(c) for c, _ in pts], [math.log(v) for _, v in pts], "power_law")
    B, lnA = fit.params
    A = math.exp(lnA)
    rms = math.sqrt(math.fsum((v - A * c**B) ** 2 for c, v in pts) / len(pts))
    return A, B, rms


def sobolev_exponent(points: Sequence) -> tuple:
    """Rate s from lambda_N ~ N**(-2s) over (N, lambda) points; returns (s, R^2)."""
    if len(points) < 3:
        raise ValueError("need at least 3 pre-saturation points")
    xs = [math.log10(N) for N, _ in points]
    ys = [float(mpmath.log10(mpmath.mpf(lam))) for _, lam in points]
    fit = fit_linear_ls(xs, ys, "sobolev")
    return -fit.params[0] / 2, fit.r_squared


def sobolev_scaling_fit(points: Sequence) -> FitResult:
    """s(c) as a linear function of log c over (c, s) points."""
    return fit_linear_ls([math.log(c) for c, _ in points], [float(s) for _, s in points], "sobolev_scaling")


def multi_zero_rates(errors: Sequence[Sequence], min_cutoffs: int = 3) -> dict:
    """Slope of log10 |gamma_k err| against log10 |gamma_1 err| across cutoffs.

    ``errors[i][k]`` is the k-th zero error at cutoff i (missing entries
    may be None or absent).  Returns {"rates": {k: (ratio, r2)},
    "skipped": [k, ...]} with k counted from 1.
    """
    kmax = max((len(e) for e in errors), default=0)
    rates, skipped = {}, []
    for k in range(kmax):
        pairs = []
        for e in errors:
            if len(e) > k and e[0] is not None and e[k] is not None and e[0] > 0 and e[k] > 0:
                pairs.append((float(mpmath.log10(e[0])), float(mpmath.log10(e[k]))))
        distinct = len({p[0] for p in pairs})
        if len(pairs) < min_cutoffs or distinct < 2:
            skipped.append(k + 1)
            continue
        fit = fit_linear_ls([p[0] for p in pairs], [p[1] for p in pairs], "rate_%d" % (k + 1))
        rates[k + 1] = (fit.params[0], fit.r_squared)
    return {"rates": rates, "skipped": skipped}
