"""Time the pure-Python and GMP kernels on inputs shaped like a real cell.

    python3 benchmarks/bench_kernels.py --dps 80 --nodes 1500 --dim 31

Both backends must return identical integers; the script exits non-zero
if they do not.
"""

import argparse
import sys
import time

import numpy as np

from truncweil import _pykernels
from truncweil.mpkit import make_context

try:
    from truncweil import _ckernels
except ImportError:
    _ckernels = None


def pole_inputs(ctx, nodes, count, rng):
    one = 1 << ctx.prec
    taus = np.sort(rng.uniform(1e-3, 800.0, nodes))
    g = [int(v * one) for v in rng.normal(0.0, 1.0, nodes)]
    tf = [int(t * one) for t in taus]
    af = [0] + [int(a * one) for a in rng.uniform(0.5, 250.0, count - 1)]
    return g, tf, af


def jacobi_input(ctx, dim, rng):
    mp = ctx.mp
    a = rng.standard_normal((dim, dim))
    a = (a + a.T) / 2
    fixed = [[ctx.to_fixed(mp.mpf(float(a[i][j]))) for j in range(dim)] for i in range(dim)]
    frob = mp.sqrt(mp.fsum(mp.mpf(float(x)) ** 2 for x in a.ravel()))
    tol = ctx.to_fixed(frob * ctx.work_eps * 100 / dim)
    return fixed, tol


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dps", type=int, default=80)
    ap.add_argument("--nodes", type=int, default=1500, help="quadrature nodes in pole_sums")
    ap.add_argument("--count", type=int, default=101, help="frequencies in pole_sums")
    ap.add_argument("--dim", type=int, default=31, help="matrix size for jacobi_eigh")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled kernels are not built; only the Python backend is available", file=sys.stderr)
        return 1
    ctx = make_context(args.dps)
    rng = np.random.default_rng(args.seed)
    g, tf, af = pole_inputs(ctx, args.nodes, args.count, rng)
    fixed, tol = jacobi_input(ctx, args.dim, rng)

    cases = [
        ("pole_sums", lambda k: lambda: k.pole_sums(g, tf, af, ctx.prec)),
        ("jacobi_eigh", lambda k: lambda: k.jacobi_eigh(fixed, ctx.prec, tol)),
    ]
    print("dps %d (prec %d bits), %d nodes x %d freqs, %dx%d matrix" % (args.dps, ctx.prec, args.nodes, args.count, args.dim, args.dim))
    print("%-12s %12s %12s %8s  %s" % ("kernel", "python [s]", "gmp [s]", "speedup", "identical"))
    ok = True
    for name, make in cases:
        tp, rp = best_of(make(_pykernels), args.repeat)
        tc, rc = best_of(make(_ckernels), args.repeat)
        same = rp == rc
        ok &= same
        print("%-12s %12.4f %12.4f %8.1f  %s" % (name, tp, tc, tp / tc, "yes" if same else "NO"))
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
