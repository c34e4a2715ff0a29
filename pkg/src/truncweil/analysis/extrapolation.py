"""Sequence acceleration and the closed-form continuum prediction."""

from __future__ import annotations

import math
from dataclasses import dataclass


def aitken(x0, x1, x2):
    """Aitken delta-squared limit of three consecutive terms.

    Exact on geometric sequences.  Fractions stay exact; floats follow
    ordinary float arithmetic.
    """
    d1 = x1 - x0
    d2 = x2 - x1
    den = d2 - d1
    if den == 0:
        raise ZeroDivisionError("equal consecutive differences: sequence is arithmetic")
    return x0 - d1 * d1 / den


@dataclass(frozen=True)
class AitkenReport:
    differences: tuple
    ratios: tuple
    anchors: tuple


def aitken_report(x) -> AitkenReport:
    """Difference ratios and both overlapping-triple limits of a 4-term sequence."""
    if len(x) != 4:
        raise ValueError("need exactly 4 values")
    d = tuple(x[i + 1] - x[i] for i in range(3))
    ratios = tuple(abs(d[i + 1] / d[i]) for i in range(2))
    anchors = (aitken(*x[0:3]), aitken(*x[1:4]))
    return AitkenReport(d, ratios, anchors)


@dataclass(frozen=True)
class Prediction:
    prefactor: float
    main: float
    correction: float

    @property
    def total(self) -> float:
        return self.prefactor + self.main + self.correction


def continuum_components(c: float) -> Prediction:
    """log10 of 2**14 sqrt(2) pi**5 / 3 * c**(9/2) * exp(-4 pi c), term by term."""
    if not c > 0:
        raise ValueError("c must be positive")
    prefactor = 14 * math.log10(2) + 0.5 * math.log10(2) + 5 * math.log10(math.pi) - math.log10(3)
    main = -4 * math.pi * c / math.log(10)
    correction = 4.5 * math.log10(c)
    return Prediction(prefactor, main, correction)


def continuum_prediction(c: float) -> float:
    """Predicted log10 of the smallest eigenvalue in the continuum limit at cutoff c."""
    if not c > 1:
        raise ValueError("c must exceed 1")
    return continuum_components(c).total


