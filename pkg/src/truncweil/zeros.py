"""Zeros of the even-sector Fourier-Mellin transform of an eigenvector.

Even basis functions on [0, L] are 1/sqrt(L) and sqrt(2/L) cos(2 pi k y/L).
Their transforms are taken about the midpoint y = L/2,

    M_k(g) = int_0^L u_k(y) exp(i g (y - L/2)) dy,

which is real and even in g.  F_even(g) = sum_k v_k M_k(g).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

from .mpkit import PrecisionContext, refine_root, scan_sign_changes, stable_phase_integral


@dataclass(frozen=True)
class ReferenceZeros:
    kind: str
    values: tuple
    provenance: str

    def __post_init__(self):
        prev = 0.0
        for s in self.values:
            x = float(s)
            if not x > prev:
                raise ValueError("reference zeros must be positive and ascending")
            prev = x

    def digits(self, k: int) -> int:
        s = self.values[k]
        return len(s.replace(".", "").lstrip("0"))

    def value(self, k: int, ctx: PrecisionContext):
        return ctx.mp.mpf(self.values[k])


def load_reference_zeros(kind: str = "zeta") -> ReferenceZeros:
    data = json.loads(resources.files("truncweil.data").joinpath("reference_zeros.json").read_text())
    entry = data["sets"][kind]
    return ReferenceZeros(kind, tuple(entry["values"]), entry["provenance"])


@dataclass
class ZeroReport:
    gammas: list
    abs_errors: list = field(default_factory=list)
    matching_digits: list = field(default_factory=list)
    fm_slopes: list = field(default_factory=list)
    partial: bool = False
    spec: object = None


def mellin_mode_transform(k: int, gamma, L, ctx: PrecisionContext):
    """M_k(gamma) for the k-th even basis function, centred at L/2."""
    mp = ctx.mp
    gamma = mp.mpf(gamma)
    L = mp.mpf(L)
    half = L / 2
    # exp(-i g L/2) * int_0^L e^{i b y} dy = Re phi(b, L/2) summed over b = g +/- a
    if k == 0:
        return 2 * stable_phase_integral(gamma, half, ctx).real / mp.sqrt(L)
    a = 2 * mp.pi * k / L
    sign = -1 if k % 2 else 1
    s = stable_phase_integral(gamma - a, half, ctx).real + stable_phase_integral(gamma + a, half, ctx).real
    return sign * mp.sqrt(2 / L) * s


def f_even(gamma, v: Sequence, L, ctx: PrecisionContext):
    mp = ctx.mp
    return mp.fsum(vk * mellin_mode_transform(k, gamma, L, ctx) for k, vk in enumerate(v))


def extract_zeros(
    v: Sequence,
    L,
    count: int,
    window=(5, 60),
    step=0.25,
    tol=None,
    ctx: PrecisionContext | None = None,
) -> ZeroReport:
    """First ``count`` real zeros of F_even inside ``window``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if ctx is None:
        raise ValueError("a precision context is required")
    mp = ctx.mp
    if tol is None:
        tol = mp.mpf(10) ** (-ctx.dps)
    lo, hi = (mp.mpf(w) for w in window)
    f = lambda g: f_even(g, v, L, ctx)  # noqa: E731
    brackets = scan_sign_changes(f, lo, hi, mp.mpf(step))
    gammas = [refine_root(f, b, tol, ctx) for b in brackets[:count]]
    h = mp.mpf(10) ** (-ctx.dps / 4.0)
    slopes = [(f(g + h) - f(g - h)) / (2 * h) for g in gammas]
    return ZeroReport(gammas, fm_slopes=slopes, partial=len(gammas) < count)


def score_zeros(report: ZeroReport, refs: ReferenceZeros, ctx: PrecisionContext) -> ZeroReport:
    """Fill abs_errors and matching_digits against the reference set."""
    if len(report.gammas) > len(refs.values):
        raise ValueError("not enough reference zeros")
    report.abs_errors = [abs(g - refs.value(k, ctx)) for k, g in enumerate(report.gammas)]
    report.matching_digits = matching_digits(report, refs, ctx)
    return report


def matching_digits(report: ZeroReport, refs: ReferenceZeros, ctx: PrecisionContext | None = None) -> list:
    """floor(-log10 |gamma_k - ref_k|) for every extracted zero."""
    out = []
    for k, g in enumerate(report.gammas):
        if k >= len(refs.values):
            raise ValueError("no reference value for zero %d" % (k + 1))
        mp = g.context
        need = int(math.ceil(mp.dps)) + 5
        if refs.digits(k) < need:
            raise ValueError("reference zero %d has %d digits, %d needed" % (k + 1, refs.digits(k), need))
        err = abs(g - mp.mpf(refs.values[k]))
        out.append(digits_from_error(err))
    return out


def digits_from_error(err) -> int:
    """floor(-log10 err), with exact decades handled without rounding drift."""
    if err == 0:
        raise ValueError("zero error has no digit count")
    try:
        mp = err.context
    except AttributeError:
        import mpmath as mp
    e = mp.mpf(err)
    # the slack keeps exact decades such as 1e-55 from rounding down to 54
    return int(mp.floor(-mp.log10(e) + mp.mpf(10) ** (-(mp.dps // 2))))
