"""Command-line entry points.

Exit status: 0 on success, 2 for configuration errors, 3 when a numerical
contract is violated (non-convergent eigensolver or root refinement).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import analysis as an
from .records import SchemaError, dumps, load_document, records_from_files
from .runner import CHARACTERS, DEFAULT_TOL, run_cell, run_sweep
from .weil_kernel import CutoffSpec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SELECTORS = ("models", "logperiodic", "aitken", "sobolev", "overlaps", "pca", "rmt", "steps", "coupling", "classify", "powerlaw")


class ConfigError(ValueError):
    pass


def _cores() -> int:
    return os.cpu_count() or 1


def _spec_from(args, c) -> CutoffSpec:
    try:
        return CutoffSpec(c, args.T, args.N, args.dps, CHARACTERS[args.character])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _cell_kw(args) -> dict:
    return {
        "count": args.count,
        "window": (args.window[0], args.window[1]),
        "step": args.step,
        "tol": args.tol,
        "cache_dir": args.cache_dir,
    }


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_cell(args) -> int:
    spec = _spec_from(args, args.c)
    rec = run_cell(spec, jobs=args.jobs, **_cell_kw(args))
    _emit(rec.to_json(), args.out)
    if args.out:
        print("c=%s status=%s lambda=%s digits=%s" % (rec.c, rec.status, _short(rec.lambda_even), rec.matching_digits[:1]))
    return EXIT_OK


def _short(s) -> str:
    if s is None:
        return "-"
    x = float(s)
    # below the float range the decimal string itself is shown
    return "%.4e" % x if x != 0 else s[:12]


def cmd_sweep(args) -> int:
    specs = [_spec_from(args, c) for c in args.cutoffs]
    doc = run_sweep(specs, jobs=args.jobs, **_cell_kw(args))
    _emit(dumps(doc), args.out)
    for f in doc["failures"]:
        print("cell c=%s failed: %s" % (f["c"], f["error"]), file=sys.stderr)
    return EXIT_OK


def cmd_zeros(args) -> int:
    doc = load_document(args.record)
    cells = doc["cells"] if doc.get("kind") == "sweep" else [doc]
    buf = io.StringIO()
    for rec in cells:
        buf.write("c=%s N=%s dps=%s status=%s\n" % (rec["c"], rec["N"], rec["dps"], rec["status"]))
        buf.write("%3s  %-32s %-14s %s\n" % ("k", "gamma", "|error|", "digits"))
        for k, g in enumerate(rec["gammas"]):
            err = rec["gamma_errors"][k] if k < len(rec["gamma_errors"]) else "-"
            dig = rec["matching_digits"][k] if k < len(rec["matching_digits"]) else "-"
            buf.write("%3d  %-32s %-14s %s\n" % (k + 1, g[:32], _short(err) if err != "-" else err, dig))
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_predict(args) -> int:
    if not args.c > 1:
        raise ConfigError("c must exceed 1")
    p = an.continuum_components(args.c)
    print("c = %g" % args.c)
    print("prefactor   %10.2f" % p.prefactor)
    print("main        %10.2f" % p.main)
    print("correction  %10.2f" % p.correction)
    print("log10 total %10.2f" % p.total)
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze


def _sweep(recs):
    if recs is None:
        return an.sweep_fixture()
    try:
        return an.dataset_from_records(recs)
    except ValueError as exc:
        raise ConfigError("records do not form a c-sweep: %s" % exc) from None


def _table(header, rows) -> tuple:
    """Aligned text and CSV renderings of the same rows."""
    cells = [[_cell(v) for v in r] for r in rows]
    widths = [max(len(str(h)), *(len(r[i]) for r in cells)) if cells else len(str(h)) for i, h in enumerate(header)]
    lines = ["  ".join(str(h).ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in cells]
    sio = io.StringIO()
    w = csv.writer(sio, lineterminator="\n")
    w.writerow(header)
    w.writerows(cells)
    return "\n".join(lines) + "\n", sio.getvalue()


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return "%.6g" % v
    return str(v)


def _need_records(recs, what):
    if recs is None:
        raise ConfigError("%s needs computed cell records (--dataset); the fixture has no eigenvectors" % what)
    return recs


def _mp_vectors(recs):
    import mpmath

    ctx = mpmath.MPContext()
    ctx.dps = max(int(r["dps"]) for r in recs) + 12
    out = []
    for r in recs:
        if not r.get("eigenvector"):
            raise ConfigError("record c=%s has no stored eigenvector" % r["c"])
        out.append([ctx.mpf(x) for x in r["eigenvector"]])
    return out


def analyze(args) -> tuple:
    sel = args.selector
    recs = records_from_files(args.dataset) if args.dataset else None
    if sel == "models":
        fits = an.fit_models_m1_m8(_sweep(recs))
        return _table(["model", "max_residual", "r_squared", "a", "b", "verdict"], [
            [f.model_id, f.max_abs_residual, f.r_squared, f.params[0], f.params[1], f.verdict()] for f in fits
        ])
    if sel == "logperiodic":
        train = _sweep(recs).subset(lambda r: r.c <= args.train_max_c)
        held = {r.c: r.log10_gamma1_err for r in _sweep(recs).rows if r.c > args.train_max_c and r.c <= args.test_max_c}
        fit = an.fit_log_periodic(train)
        rows = [["train", "-", "-", fit.max_abs_residual, " ".join("%.4f" % p for p in fit.params)]]
        rows += [[c, pred, act, res, "pass" if ok else "FAIL"] for c, pred, act, res, ok in an.blind_test(fit, held)]
        return _table(["c", "predicted", "actual", "abs_residual", "verdict/params"], rows)
    if sel == "aitken":
        xs = args.values if args.values else an.c100_log10_sequence()
        rep = an.aitken_report(xs)
        return _table(["quantity", "value"], [
            ["ratio_1", rep.ratios[0]], ["ratio_2", rep.ratios[1]],
            ["anchor_1", rep.anchors[0]], ["anchor_2", rep.anchors[1]],
        ])
    if sel == "sobolev":
        if recs is None:
            rows = an.fixture_table("n_convergence_c23")
            groups = {23: [(r["N"], r["lambda_min"]) for r in rows]}
        else:
            groups = {}
            for r in recs:
                if r.get("lambda_even"):
                    groups.setdefault(float(r["c"]), []).append((int(r["N"]), r["lambda_even"]))
        out = []
        for c, pts in sorted(groups.items()):
            pts = sorted(p for p in pts if p[0] <= args.max_n)
            if len(pts) >= 3:
                s, r2 = an.sobolev_exponent(pts)
                out.append([c, s, r2, len(pts)])
        if not out:
            raise ConfigError("no cutoff has 3 pre-saturation N values")
        return _table(["c", "s", "r_squared", "points"], out)
    if sel == "overlaps":
        recs = sorted(_need_records(recs, "overlaps"), key=lambda r: float(r["c"]))
        vecs = _mp_vectors(recs)
        mat = an.overlap_matrix(vecs)
        cs = [float(r["c"]) for r in recs]
        rows = [[cs[i], cs[j], float(mat[i][j])] for i in range(len(cs)) for j in range(i + 1, len(cs))]
        return _table(["c1", "c2", "overlap"], rows)
    if sel == "pca":
        recs = sorted(_need_records(recs, "pca"), key=lambda r: float(r["c"]))
        fr, _ = an.pca(_mp_vectors(recs))
        return _table(["component", "explained"], [[k + 1, float(f)] for k, f in enumerate(fr)])
    if sel == "rmt":
        recs = sorted(_need_records(recs, "rmt"), key=lambda r: float(r["c"]))
        rows = []
        for r in recs:
            bulk = [float(x) for x in r["spectrum"][1:]]
            s = an.unfold_spectrum(bulk, args.degree)
            rows.append([float(r["c"]), an.brody_fit(s)] + [an.ks_distance(s, f) for f in ("poisson", "goe", "gue")])
        return _table(["c", "brody_beta", "ks_poisson", "ks_goe", "ks_gue"], rows)
    if sel == "steps":
        rep = an.per_prime_decomposition(_sweep(recs))
        rows = [[s.c_from, s.c_to, s.delta, s.gap, s.dL, s.efficiency, s.new_prime] for s in rep.steps]
        text, csvt = _table(["c_from", "c_to", "delta", "gap", "dL", "efficiency", "new_prime"], rows)
        pl = rep.step_power_law
        text += "pearson_r %.4f  cov_raw %.4f  cov_normalized %.4f\n" % (rep.pearson_r, rep.cov_raw, rep.cov_normalized)
        if pl is not None:
            text += "late steps: K %.2f  alpha %.4f  R^2 %.4f\n" % (pl.params[0], pl.params[1], pl.r_squared)
        return text, csvt
    if sel == "coupling":
        fit = an.ratio_coupling_fit(_sweep(recs))
        return _table(["slope", "intercept", "r_squared", "max_residual"], [[fit.params[0], fit.params[1], fit.r_squared, fit.max_abs_residual]])
    if sel == "classify":
        if args.delta is None:
            raise ConfigError("classify needs --delta")
        b = an.classify_floor(args.delta)
        return _table(["delta", "bin", "key", "label"], [[args.delta, b.number, b.key, b.label]])
    if sel == "powerlaw":
        A, B, rms = an.power_law_refit(_sweep(recs))
        rows = [["sweep", A, B, rms, A * 100**B]]
        if args.include:
            extra = [tuple(map(float, p.split(":"))) for p in args.include]
            A2, B2, rms2 = an.power_law_refit(_sweep(recs), extra=extra)
            rows.append(["sweep+extra", A2, B2, rms2, A2 * 100**B2])
        return _table(["fit", "A", "B", "rms", "at_c100"], rows)
    raise ConfigError("unknown selector %r" % sel)


def cmd_analyze(args) -> int:
    text, csv_text = analyze(args)
    _emit(text, args.out)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(csv_text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_cell_options(p) -> None:
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--T", default="800")
    p.add_argument("--dps", type=int, default=80)
    p.add_argument("--character", choices=sorted(CHARACTERS), default="zeta")
    p.add_argument("--tol", default=DEFAULT_TOL)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--window", type=float, nargs=2, default=(5.0, 60.0))
    p.add_argument("--step", type=float, default=0.25)
    p.add_argument("--jobs", type=int, default=_cores())
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="truncweil", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cell", help="compute one cutoff and write its record")
    p.add_argument("--c", required=True)
    _add_cell_options(p)
    p.set_defaults(func=cmd_cell)

    p = sub.add_parser("sweep", help="compute several cutoffs")
    p.add_argument("cutoffs", nargs="+")
    _add_cell_options(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("zeros", help="tabulate the zeros stored in a record")
    p.add_argument("record")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("analyze", help="run an analysis on a dataset or the bundled fixtures")
    p.add_argument("selector", choices=SELECTORS)
    p.add_argument("--dataset", nargs="+", default=None, help="cell or sweep record files (default: fixtures)")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--values", type=float, nargs=4, default=None)
    p.add_argument("--degree", type=int, default=5)
    p.add_argument("--max-n", type=int, default=80)
    p.add_argument("--train-max-c", type=float, default=43)
    p.add_argument("--test-max-c", type=float, default=53)
    p.add_argument("--include", nargs="*", default=None, help="extra c:log10_lambda points for powerlaw")
    p.add_argument("--csv", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("predict", help="continuum log10 prediction at cutoff c")
    p.add_argument("c", type=float)
    p.set_defaults(func=cmd_predict)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, SchemaError, FileNotFoundError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as exc:
        print("numerical contract violated: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
