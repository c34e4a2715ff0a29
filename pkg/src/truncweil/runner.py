"""One cell of the pipeline: psi table, even-sector spectrum, zeros, record."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__, _backend
from .analysis.floor import floor_estimate
from .galerkin import eigensym, even_sector, residual_norms, spectral_invariants
from .records import CellRecord, sweep_document
from .weil_kernel import CHI3, ZETA, CutoffSpec, build_psi_table
from .zeros import extract_zeros, load_reference_zeros, score_zeros

CHARACTERS = {"zeta": ZETA, "chi3": CHI3}
DEFAULT_TOL = "1e-140"
KEFF_EPS = "1e-50"


def character_name(ch) -> str:
    for name, spec in CHARACTERS.items():
        if spec == ch:
            return name
    return "custom"


def _fmt_frac(x: Fraction) -> str:
    return str(x)


def run_cell(
    spec: CutoffSpec,
    jobs: int = 1,
    count: int = 10,
    window=(5, 60),
    step=0.25,
    tol=DEFAULT_TOL,
    cache_dir: str | None = None,
    keep_vectors: bool = True,
) -> CellRecord:
    """Compute one cell and return its record (deterministic apart from wall_seconds)."""
    t0 = time.perf_counter()
    ctx = spec.ctx
    mp = ctx.mp
    table = build_psi_table(spec, jobs=jobs, cache_dir=cache_dir)
    m = even_sector(table)
    res = eigensym(m, ctx)
    name = character_name(spec.character)
    rec = CellRecord(
        c=_fmt_frac(spec.c),
        N=spec.N,
        T=_fmt_frac(spec.T),
        dps=spec.dps,
        character=name,
        character_digest=spec.character.digest,
        negative_count=len(res.negative_log10_magnitudes),
        negative_log10=[round(x, 6) for x in res.negative_log10_magnitudes],
        quadrature_level=table.level,
        jacobi_sweeps=res.sweeps,
        root_tol=str(tol),
        window=[float(window[0]), float(window[1])],
        backend=_backend.BACKEND,
        psi_cache_digest=table.digest,
        hplus_cache_digest=table.hplus_cache_digest,
        tool_version=__version__,
    )
    rec.spectrum = [ctx.nstr(x) for x in res.eigenvalues]
    rec.residual_max = mp.nstr(max(residual_norms(m, res)), 6)
    i = res.smallest_positive_index
    if i is None:
        rec.status = "no-positive-eigenvalue"
    else:
        rec.status = "ok" if i == 0 else "negative-lambda-min"
        lam = res.eigenvalues[i]
        vec = res.eigenvectors[i]
        rec.lambda_even = ctx.nstr(lam)
        rec.lambda_index = i
        inv = spectral_invariants(res, eps=mp.mpf(KEFF_EPS), vector=i)
        rec.invariants = {
            "frobenius": mp.nstr(inv["frobenius"], 20),
            "bulk_trace": mp.nstr(inv["bulk_trace"], 20),
            "logdet_abs": mp.nstr(inv["logdet_abs"], 20),
            "gap_ratio": None if inv["gap_ratio"] is None else mp.nstr(inv["gap_ratio"], 20),
            "k_eff": inv["k_eff"],
            "k_eff_eps": KEFF_EPS,
        }
        norm2 = max(abs(res.eigenvalues[0]), abs(res.eigenvalues[-1]))
        fl = floor_estimate(spec.dps, norm2)
        rec.floor = mp.nstr(mp.mpf(fl), 6)
        rec.below_floor = bool(lam < mp.mpf(fl))
        if keep_vectors:
            rec.eigenvector = [ctx.nstr(x) for x in vec]
        report = extract_zeros(vec, spec.L(ctx), count, window=window, step=step, tol=mp.mpf(tol), ctx=ctx)
        rec.gammas = [ctx.nstr(g) for g in report.gammas]
        rec.fm_slopes = [mp.nstr(s, 12) for s in report.fm_slopes]
        rec.zeros_partial = report.partial
        kind = {"zeta": "zeta", "chi3": "chi3"}.get(name)
        if kind is not None and report.gammas:
            score_zeros(report, load_reference_zeros(kind), ctx)
            rec.gamma_errors = [mp.nstr(e, 20) for e in report.abs_errors]
            rec.matching_digits = list(report.matching_digits)
    rec.wall_seconds = round(time.perf_counter() - t0, 3)
    return rec


def _sweep_worker(args):
    spec, jobs, kw = args
    try:
        return run_cell(spec, jobs=jobs, **kw).to_dict(), None
    except Exception as exc:  # one bad cell must not end the sweep
        return None, {"c": str(spec.c), "error": "%s: %s" % (type(exc).__name__, exc)}


def run_sweep(specs: list, jobs: int = 1, **kw) -> dict:
    """Cells in parallel worker processes, gathered into a sweep document."""
    if not specs:
        raise ValueError("need at least one cutoff")
    workers = max(1, min(jobs, len(specs)))
    per_cell = max(1, jobs // len(specs))
    tasks = [(s, per_cell, kw) for s in specs]
    if workers == 1:
        results = [_sweep_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_worker, tasks))
    cells = [r for r, _ in results if r is not None]
    failures = [f for _, f in results if f is not None]
    s0 = specs[0]
    params = {"N": s0.N, "T": str(s0.T), "dps": s0.dps, "character": character_name(s0.character)}
    params.update({k: (list(v) if isinstance(v, tuple) else v) for k, v in kw.items() if k != "cache_dir"})
    return sweep_document(cells, failures, params)
