"""Comparisons between ground-state eigenvectors at different cutoffs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..galerkin import eigensym, matrix
from ..mpkit import PrecisionContext, make_context
from .fits import fit_linear_ls


def _ctx_for(vectors, ctx):
    if ctx is not None:
        return ctx
    try:
        return make_context(int(vectors[0][0].context.dps) - 12)
    except (AttributeError, ValueError):
        return make_context(30)


def overlap(v: Sequence, w: Sequence, ctx: PrecisionContext | None = None):
    """|<v, w>| / (|v| |w|)."""
    if len(v) != len(w):
        raise ValueError("vectors differ in dimension")
    mp = _ctx_for([v], ctx).mp
    a = [mp.mpf(x) for x in v]
    b = [mp.mpf(x) for x in w]
    na = mp.fsum(x * x for x in a)
    nb = mp.fsum(x * x for x in b)
    if na == 0 or nb == 0:
        raise ValueError("overlap of a zero vector")
    q = abs(mp.fsum(x * y for x, y in zip(a, b))) / mp.sqrt(na * nb)
    return min(q, mp.mpf(1))


def overlap_matrix(vectors: Sequence, ctx: PrecisionContext | None = None) -> list:
    n = len(vectors)
    ctx = _ctx_for(vectors, ctx)
    out = [[ctx.mp.mpf(1)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            out[i][j] = out[j][i] = overlap(vectors[i], vectors[j], ctx)
    return out


@dataclass(frozen=True)
class DecayGroup:
    gap: int
    pairs: int
    A: float | None
    alpha: float | None
    r_squared: float | None
    flag: str = ""


def overlap_decay_fit(mat: Sequence, cutoffs: Sequence, min_pairs: int = 3) -> list:
    """1 - overlap = A c_min**(-alpha) for pairs grouped by index separation.

    Group ``gap = j - i`` collects pairs (cutoffs[i], cutoffs[j]).  Groups
    with too few usable pairs are returned with flag "insufficient"; a fit
    with vanishing slope is flagged "degenerate".
    """
    n = len(cutoffs)
    out = []
    for gap in range(1, n):
        pts = []
        for i in range(n - gap):
            d = 1 - float(mat[i][i + gap])
            if d > 0:
                pts.append((math.log(cutoffs[i]), math.log(d)))
        if len(pts) < min_pairs:
            out.append(DecayGroup(gap, len(pts), None, None, None, "insufficient"))
            continue
        ys = [p[1] for p in pts]
        if max(ys) - min(ys) <= 1e-12 * max(1.0, abs(ys[0])):
            out.append(DecayGroup(gap, len(pts), math.exp(ys[0]), 0.0, 1.0, "degenerate"))
            continue
        fit = fit_linear_ls([p[0] for p in pts], ys, "overlap_decay_%d" % gap)
        slope, icpt = fit.params
        flag = "degenerate" if abs(slope) < 1e-8 else ""
        out.append(DecayGroup(gap, len(pts), math.exp(icpt), -slope, fit.r_squared, flag))
    return out


def pca(vectors: Sequence, ctx: PrecisionContext | None = None) -> tuple:
    """Variance fractions (descending) and per-vector scores of the centred set.

    Diagonalises the Gram matrix of the centred vectors with the Jacobi
    solver; ``scores[i][k]`` is the coordinate of vector i on component k.
    """
    m = len(vectors)
    if m < 2:
        raise ValueError("need at least 2 vectors")
    ctx = _ctx_for(vectors, ctx)
    mp = ctx.mp
    X = [[mp.mpf(x) for x in v] for v in vectors]
    d = len(X[0])
    if any(len(v) != d for v in X):
        raise ValueError("vectors differ in dimension")
    mean = [mp.fsum(X[i][k] for i in range(m)) / m for k in range(d)]
    Xc = [[X[i][k] - mean[k] for k in range(d)] for i in range(m)]
    gram = [[mp.fsum(a * b for a, b in zip(Xc[i], Xc[j])) for j in range(m)] for i in range(m)]
    res = eigensym(matrix(gram, ctx), ctx)
    order = list(range(m))[::-1]
    vals = [max(res.eigenvalues[i], mp.mpf(0)) for i in order]
    total = mp.fsum(vals)
    if total == 0:
        raise ValueError("vectors are identical; no variance")
    fractions = [v / total for v in vals]
    scores = [[mp.sqrt(vals[k]) * res.eigenvectors[order[k]][i] for k in range(m)] for i in range(m)]
    return fractions, scores
