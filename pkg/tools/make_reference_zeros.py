"""Regenerate src/truncweil/data/reference_zeros.json.

Zeta zeros come from mpmath.zetazero and are confirmed by an independent
bracketed refinement of the Hardy Z-function plus a direct |zeta(1/2+ig)|
residual.  Zeros of L(s, chi_3) are located as sign changes of the completed
L-function on the critical line (real there, root number 1) and refined by
bisection; each is confirmed by |L(1/2+ig, chi_3)|.

    python3 tools/make_reference_zeros.py [digits]
"""

import json
import os
import sys
import time

import mpmath

DIGITS = int(sys.argv[1]) if len(sys.argv) > 1 else 1050
COUNT = 10
OUT = os.path.join(os.path.dirname(__file__), "..", "src", "truncweil", "data", "reference_zeros.json")


def bisect(f, lo, hi, width):
    flo = f(lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def refine(f, x0):
    # secant polish from the bisection seed, then confirm the sign change
    x = mpmath.findroot(f, (x0 - mpmath.mpf("1e-12"), x0 + mpmath.mpf("1e-12")), solver="secant")
    d = mpmath.mpf(10) ** (-DIGITS - 5)
    lo, hi = x - d, x + d
    if not (f(lo) < 0) != (f(hi) < 0):
        raise RuntimeError("refined zero %s is not bracketed" % mpmath.nstr(x, 20))
    return x


def zeta_zeros():
    out = []
    for k in range(1, COUNT + 1):
        with mpmath.workdps(DIGITS + 20):
            g = mpmath.zetazero(k).imag
            # independent check: coarse bisection on Z, then secant polish
            seed = bisect(mpmath.siegelz, g - mpmath.mpf("0.01"), g + mpmath.mpf("0.01"), mpmath.mpf("1e-20"))
            g2 = refine(mpmath.siegelz, seed)
            diff = abs(g - g2)
            res = abs(mpmath.zeta(mpmath.mpc(0.5, g)))
        assert diff < mpmath.mpf(10) ** (-DIGITS - 2), diff
        assert res < mpmath.mpf(10) ** (-DIGITS), res
        out.append(mpmath.nstr(g, DIGITS, strip_zeros=False))
        print("zeta", k, out[-1][:30], "check", mpmath.nstr(diff, 3), mpmath.nstr(res, 3), flush=True)
    return out


def chi3_completed(t):
    # Lambda(1/2 + it) = (3/pi)^{(s+1)/2} Gamma((s+1)/2) L(s, chi_3), real for real t
    s = mpmath.mpc(0.5, t)
    v = (3 / mpmath.pi) ** ((s + 1) / 2) * mpmath.gamma((s + 1) / 2) * mpmath.dirichlet(s, [0, 1, -1])
    return v.real


def chi3_zeros(digits):
    out = []
    with mpmath.workdps(30):
        t = mpmath.mpf(0.5)
        prev = chi3_completed(t)
        seeds = []
        while len(seeds) < COUNT:
            t2 = t + mpmath.mpf("0.05")
            cur = chi3_completed(t2)
            if (cur < 0) != (prev < 0):
                seeds.append(bisect(chi3_completed, t, t2, mpmath.mpf("1e-15")))
            t, prev = t2, cur
    for k, seed in enumerate(seeds, start=1):
        with mpmath.workdps(digits + 20):
            g = mpmath.findroot(chi3_completed, (seed - mpmath.mpf("1e-13"), seed + mpmath.mpf("1e-13")), solver="anderson")
            d = mpmath.mpf(10) ** (-digits - 5)
            assert (chi3_completed(g - d) < 0) != (chi3_completed(g + d) < 0)
            res = abs(mpmath.dirichlet(mpmath.mpc(0.5, g), [0, 1, -1]))
        assert res < mpmath.mpf(10) ** (-digits), res
        out.append(mpmath.nstr(g, digits, strip_zeros=False))
        print("chi3", k, out[-1][:30], "residual", mpmath.nstr(res, 3), flush=True)
    return out


def main():
    t0 = time.time()
    zeta = zeta_zeros()
    chi3 = chi3_zeros(min(DIGITS, 450))
    doc = {
        "format": 1,
        "sets": {
            "zeta": {
                "values": zeta,
                "provenance": "mpmath.zetazero at %d digits; confirmed by independent Z-function refinement "
                "and |zeta(1/2+ig)| < 1e-%d" % (DIGITS + 20, DIGITS),
            },
            "chi3": {
                "values": chi3,
                "provenance": "sign changes of the completed L(s, chi_3) on the critical line refined at %d digits; "
                "confirmed by |L(1/2+ig, chi_3)| residual" % (min(DIGITS, 450) + 20),
            },
        },
    }
    with open(OUT, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print("wrote", OUT, "in %.1fs" % (time.time() - t0))


if __name__ == "__main__":
    main()
