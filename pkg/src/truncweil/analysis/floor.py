"""Precision-floor estimate and the five-bin step classifier."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath


def floor_estimate(dps: int, q_norm):
    """Backward-error floor 10**(-dps) * ||Q|| for a symmetric eigenvalue."""
    if not q_norm > 0:
        raise ValueError("matrix norm must be positive")
    return mpmath.mpf(10) ** (-dps) * mpmath.mpf(q_norm)


@dataclass(frozen=True)
class FloorBin:
    number: int
    key: str
    label: str


BINS = (
    FloorBin(1, "5A", "5A confirmed"),
    FloorBin(2, "ambiguous", "Ambiguous partial floor"),
    FloorBin(3, "5B-live", "5B live"),
    FloorBin(4, "5B-strong", "5B strong"),
    FloorBin(5, "reversal", "Reversal"),
)

# upper edges of bins 1..4; a value equal to an edge falls in the lower bin
EDGES = (-15.0, -5.29, -1.0, 0.0)


def classify_floor(delta: float) -> FloorBin:
    """Bin for the change in log10 error across a step that may touch the floor."""
    for edge, b in zip(EDGES, BINS):
        if delta <= edge:
            return b
    return BINS[-1]


def below_floor(value, dps: int, q_norm) -> bool:
    return abs(mpmath.mpf(value)) < floor_estimate(dps, q_norm)
