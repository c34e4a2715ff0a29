"""Pure-Python fixed-point kernels.

Every quantity is an integer mantissa at a common binary scale 2**-prec.
Products are rescaled with a floor shift and quotients use floor division,
so the compiled core in ``_ckernels.pyx`` (GMP ``mpz_fdiv_*``/``mpz_sqrt``)
reproduces these results bit for bit.
"""

from math import isqrt

NAME = "python"


def pole_sums(gvals, taus, avals, prec):
    """Weighted rational sums over quadrature nodes.

    With g_j already divided by tau_j**2, returns for each a in ``avals``
        s(a)  = sum_j g_j * tau_j**2 / (tau_j**2 - a**2)
        sp(a) = sum_j g_j * tau_j**2 * (1/(tau_j - a)**2 + 1/(tau_j + a)**2)
    at scale 2**-prec.  Every a is positive or zero, and g_j vanishes to
    second order wherever tau_j equals a nonzero a.
    """
    tau2 = [t * t for t in taus]
    gt2 = [g * t2 for g, t2 in zip(gvals, tau2)]
    total = sum(gvals)
    s_out = []
    sp_out = []
    for a in avals:
        if a == 0:
            s_out.append(total)
            sp_out.append(2 * total)
            continue
        a2 = a * a
        s = 0
        sp = 0
        for num, t, t2 in zip(gt2, taus, tau2):
            dm = t - a
            if dm == 0:
                continue
            dp = t + a
            s += num // (t2 - a2)
            sp += num // (dm * dm) + num // (dp * dp)
        s_out.append(s)
        sp_out.append(sp)
    return s_out, sp_out


def jacobi_eigh(a, prec, tol, max_sweeps=60):
    """Cyclic Jacobi on a symmetric fixed-point matrix given as row lists.

    Rotations with |a_pq| <= tol are skipped; the first three sweeps also
    skip entries below 0.2*sum|a_pq|/n**2.  Returns (diag, V, sweeps) with
    the eigenvectors stored in the columns of V.  Raises RuntimeError when
    the sweep budget runs out.
    """
    n = len(a)
    a = [list(row) for row in a]
    one = 1 << prec
    v = [[0] * n for _ in range(n)]
    for i in range(n):
        v[i][i] = one
    for sweep in range(max_sweeps):
        total = 0
        for p in range(n - 1):
            row = a[p]
            for q in range(p + 1, n):
                x = row[q]
                total += x if x >= 0 else -x
        if total == 0:
            return [a[i][i] for i in range(n)], v, sweep
        thresh = (total // (5 * n * n)) if sweep < 3 else 0
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                mag = apq if apq >= 0 else -apq
                if mag <= tol or mag <= thresh:
                    continue
                rotated += 1
                app = a[p][p]
                aqq = a[q][q]
                d = aqq - app
                e = apq << 1
                ae = e if e >= 0 else -e
                ad = d if d >= 0 else -d
                t = (ae << prec) // (ad + isqrt(d * d + e * e))
                if (d < 0) != (apq < 0) and d != 0:
                    t = -t
                c = (one << prec) // isqrt((one << prec) + t * t)
                s = (t * c) >> prec
                tp = (t * apq) >> prec
                a[p][p] = app - tp
                a[q][q] = aqq + tp
                a[p][q] = 0
                a[q][p] = 0
                for r in range(n):
                    if r == p or r == q:
                        continue
                    ar = a[r]
                    arp = ar[p]
                    arq = ar[q]
                    nrp = (c * arp - s * arq) >> prec
                    nrq = (s * arp + c * arq) >> prec
                    ar[p] = nrp
                    ar[q] = nrq
                    a[p][r] = nrp
                    a[q][r] = nrq
                for vr in v:
                    vrp = vr[p]
                    vrq = vr[q]
                    vr[p] = (c * vrp - s * vrq) >> prec
                    vr[q] = (s * vrp + c * vrq) >> prec
        if rotated == 0:
            return [a[i][i] for i in range(n)], v, sweep + 1
    raise RuntimeError("Jacobi iteration did not converge in %d sweeps" % max_sweeps)
