"""Sweep datasets, fit results and the bundled measurement fixtures."""

from __future__ import annotations

import json
import math

import mpmath
from dataclasses import dataclass, field
from importlib import resources


@dataclass(frozen=True)
class SweepRow:
    c: float
    lambda_min: object = None
    gamma_errors: tuple = ()
    log10_gamma1_err: float | None = None
    negative_count: int = 0
    invariants: dict = field(default_factory=dict)
    log10_lambda: float | None = None

    @property
    def L(self) -> float:
        return math.log(self.c)


@dataclass(frozen=True)
class SweepDataset:
    rows: tuple
    provenance: str = "computed"

    def __post_init__(self):
        if self.provenance not in ("fixture", "computed"):
            raise ValueError("provenance must be 'fixture' or 'computed'")
        cs = [r.c for r in self.rows]
        if any(b <= a for a, b in zip(cs, cs[1:])):
            raise ValueError("rows must be strictly ascending in c")

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]

    def subset(self, keep) -> "SweepDataset":
        """Rows for which ``keep(row)`` is true."""
        return SweepDataset(tuple(r for r in self.rows if keep(r)), self.provenance)


@dataclass(frozen=True)
class FitResult:
    model_id: str
    params: tuple
    residuals: tuple
    max_abs_residual: float
    r_squared: float
    pass_threshold: bool | None = None

    def verdict(self) -> str:
        if self.pass_threshold is None:
            return "-"
        return "PASS" if self.pass_threshold else "FAIL"


def r_squared(ys, residuals) -> float:
    """Centred coefficient of determination 1 - SSR/SST."""
    n = len(ys)
    mean = math.fsum(ys) / n
    sst = math.fsum((y - mean) ** 2 for y in ys)
    ssr = math.fsum(r * r for r in residuals)
    if sst == 0:
        return 1.0 if ssr == 0 else -math.inf
    return 1.0 - ssr / sst


def make_fit(model_id: str, params, ys, predicted, threshold=None) -> FitResult:
    res = tuple(float(y - p) for y, p in zip(ys, predicted))
    worst = max(abs(r) for r in res)
    ok = None if threshold is None else worst <= threshold
    return FitResult(model_id, tuple(float(p) for p in params), res, worst, r_squared(list(ys), res), ok)


# ---------------------------------------------------------------------------
# fixtures

_FIXTURES = None


def fixtures() -> dict:
    global _FIXTURES
    if _FIXTURES is None:
        text = resources.files("truncweil.data").joinpath("fixtures.json").read_text()
        _FIXTURES = json.loads(text)
        if _FIXTURES.get("format") != 1:
            raise ValueError("unsupported fixture format %r" % _FIXTURES.get("format"))
    return _FIXTURES


def fixture_table(name: str) -> list:
    """Rows of a fixture table as dicts keyed by column name."""
    tab = fixtures()[name]
    cols = tab["columns"]
    return [dict(zip(cols, row)) for row in tab["rows"]]


def _num(x):
    return None if x is None else float(x)


def _big(x):
    # mpf keeps exponents far outside the float range (errors near 1e-330)
    return None if x is None else mpmath.mpf(x)


def log10_decimal(s) -> float | None:
    """log10 |x| of a decimal string, safe below the float range."""
    if s is None:
        return None
    x = mpmath.mpf(s)
    if x == 0:
        return -math.inf
    return float(mpmath.log10(abs(x)))


def sweep_fixture(limit_c: float | None = None) -> SweepDataset:
    """The 15-cutoff sweep as a fixture dataset, optionally truncated at c <= limit_c."""
    rows = []
    for r in fixture_table("sweep_15pt"):
        if limit_c is not None and r["c"] > limit_c:
            continue
        rows.append(
            SweepRow(
                c=float(r["c"]),
                lambda_min=_big(r["lambda_min"]),
                gamma_errors=(_big(r["gamma1_err"]),),
                log10_gamma1_err=_num(r["log10_gamma1_err"]),
                log10_lambda=log10_decimal(r["lambda_min"]),
            )
        )
    return SweepDataset(tuple(rows), "fixture")


def c100_log10_sequence() -> list:
    """log10 lambda_min at c = 100 for N = 100, 150, 200, 250 (dps 500)."""
    return [float(r["log10_lambda"]) for r in fixture_table("c100_n_sweep") if r["dps"] == 500]


def dataset_from_records(records: list) -> SweepDataset:
    """SweepDataset from parsed cell records (dicts), sorted by c."""
    rows = []
    for rec in sorted(records, key=lambda r: r["c"]):
        lam = rec.get("lambda_even")
        errs = tuple(_big(e) for e in rec.get("gamma_errors", []))
        log10 = log10_decimal(rec["gamma_errors"][0]) if errs else None
        rows.append(
            SweepRow(
                c=float(rec["c"]),
                lambda_min=_big(lam),
                gamma_errors=errs,
                log10_gamma1_err=log10,
                negative_count=int(rec.get("negative_count", 0)),
                invariants=dict(rec.get("invariants", {})),
                log10_lambda=log10_decimal(lam),
            )
        )
    return SweepDataset(tuple(rows), "computed")
