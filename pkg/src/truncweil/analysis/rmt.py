"""Nearest-neighbour spacing statistics of a spectrum."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import optimize, special, stats


def unfold_spectrum(bulk: Sequence, degree: int = 5) -> list:
    """Spacings of the polynomially unfolded spectrum, normalised to mean 1.

    A degree-``degree`` polynomial is fitted to the counting function
    i -> i + 1 at the sorted eigenvalues.
    """
    x = np.asarray([float(v) for v in bulk], dtype=float)
    if len(x) < degree + 2:
        raise ValueError("need at least %d eigenvalues for degree %d" % (degree + 2, degree))
    if np.any(np.diff(x) < 0):
        raise ValueError("eigenvalues must be ascending")
    lo, hi = x[0], x[-1]
    if hi == lo:
        raise ValueError("degenerate fit: all eigenvalues equal")
    u = (x - lo) / (hi - lo)
    counts = np.arange(1, len(x) + 1, dtype=float)
    poly = np.polynomial.Polynomial.fit(u, counts, degree)
    s = np.diff(poly(u))
    if np.any(s <= 0):
        raise ValueError("degenerate fit: unfolded spectrum is not increasing")
    s = s / s.mean()
    return [float(v) for v in s]


def brody_a(beta: float) -> float:
    return math.gamma((beta + 2) / (beta + 1)) ** (beta + 1)


def brody_loglik(beta: float, s: np.ndarray) -> float:
    a = brody_a(beta)
    return float(np.sum(np.log((beta + 1) * a) + beta * np.log(s) - a * s ** (beta + 1)))


def brody_fit(spacings: Sequence) -> float:
    """Maximum-likelihood Brody parameter on [0, 1]."""
    s = np.asarray([float(v) for v in spacings], dtype=float)
    if len(s) < 20:
        raise ValueError("need at least 20 spacings")
    if np.any(s <= 0):
        raise ValueError("spacings must be positive")
    r = optimize.minimize_scalar(lambda b: -brody_loglik(b, s), bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-8})
    # the bounded search never evaluates the end points themselves
    cands = [(r.fun, float(r.x)), (-brody_loglik(0.0, s), 0.0), (-brody_loglik(1.0, s), 1.0)]
    return min(cands)[1]


def poisson_cdf(s):
    return 1 - np.exp(-np.asarray(s, dtype=float))


def goe_cdf(s):
    s = np.asarray(s, dtype=float)
    return 1 - np.exp(-math.pi * s * s / 4)


def gue_cdf(s):
    s = np.asarray(s, dtype=float)
    return special.erf(2 * s / math.sqrt(math.pi)) - 4 * s / math.pi * np.exp(-4 * s * s / math.pi)


FAMILIES = {"poisson": poisson_cdf, "goe": goe_cdf, "gue": gue_cdf}


def ks_distance(spacings: Sequence, family: str) -> float:
    """Kolmogorov-Smirnov distance between the spacings and a surmise."""
    try:
        cdf = FAMILIES[family]
    except KeyError:
        raise ValueError("family must be one of %s" % ", ".join(sorted(FAMILIES))) from None
    s = [float(v) for v in spacings]
    if not s:
        raise ValueError("no spacings")
    return float(stats.kstest(s, cdf).statistic)


def wigner_samples(n: int, rng: np.random.Generator) -> np.ndarray:
    """Draws from the GOE Wigner surmise by inversion."""
    u = rng.random(n)
    return np.sqrt(-4 * np.log1p(-u) / math.pi)
