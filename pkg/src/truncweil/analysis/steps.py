"""Step-by-step gains between consecutive cutoffs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..weil_kernel import prime_power_bases
from .dataset import FitResult, SweepDataset, make_fit
from .fits import log_lattice, multistart_simplex


@dataclass(frozen=True)
class Step:
    c_from: float
    c_to: float
    delta: float
    gap: float
    dL: float
    efficiency: float
    new_prime: int | None


@dataclass(frozen=True)
class StepReport:
    steps: tuple
    pearson_r: float
    cov_raw: float
    cov_normalized: float
    step_power_law: FitResult | None


def _new_prime(a: float, b: float) -> int | None:
    primes = [p for n, p in prime_power_bases(int(b)) if n == p and a < p <= b]
    return primes[-1] if primes else None


def coefficient_of_variation(xs) -> float:
    x = np.asarray(xs, dtype=float)
    return float(np.std(x) / abs(np.mean(x)))


def step_power_law(steps, c_min: float = 31) -> FitResult | None:
    """|delta| = K gap c**(-alpha) on the steps ending at c >= c_min."""
    late = [s for s in steps if s.c_to >= c_min]
    if len(late) < 3:
        return None
    y = np.asarray([abs(s.delta) for s in late])
    g = np.asarray([s.gap for s in late])
    c = np.asarray([s.c_to for s in late])

    def sse(q):
        return float(np.sum((y - q[0] * g * c ** (-q[1])) ** 2))

    starts = [(K, a) for K in log_lattice(10.0, 1e4, 4) for a in log_lattice(0.25, 2.0, 4)]
    best = multistart_simplex(sse, starts)
    K, alpha = best.x
    return make_fit("step_power_law", (K, alpha), list(y), list(K * g * c ** (-alpha)))


def per_prime_decomposition(ds: SweepDataset, c_min: float = 31) -> StepReport:
    if len(ds) < 3:
        raise ValueError("need at least 3 consecutive rows")
    steps = []
    for a, b in zip(ds.rows, ds.rows[1:]):
        delta = b.log10_gamma1_err - a.log10_gamma1_err
        dlog10 = math.log10(b.c) - math.log10(a.c)
        steps.append(Step(a.c, b.c, delta, b.c - a.c, b.L - a.L, delta / dlog10, _new_prime(a.c, b.c)))
    d = [s.delta for s in steps]
    r = float(np.corrcoef(d, [s.dL for s in steps])[0, 1])
    return StepReport(
        tuple(steps),
        r,
        coefficient_of_variation(d),
        coefficient_of_variation([s.efficiency for s in steps]),
        step_power_law(steps, c_min),
    )
