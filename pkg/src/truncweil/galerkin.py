"""Galerkin matrix of the truncated Weil form and its symmetric eigenproblem."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import _backend
from .mpkit import PrecisionContext, make_context
from .weil_kernel import CutoffSpec, PsiTable


@dataclass(frozen=True)
class GalerkinMatrix:
    spec: CutoffSpec | None
    sector: str
    dim: int
    entries: tuple

    def __post_init__(self):
        if self.sector not in ("full", "even", "odd"):
            raise ValueError("unknown sector %r" % self.sector)
        if len(self.entries) != self.dim or any(len(r) != self.dim for r in self.entries):
            raise ValueError("entries must be a %d x %d matrix" % (self.dim, self.dim))

    @property
    def mp(self):
        return self.entries[0][0].context

    def frobenius(self):
        mp = self.mp
        return mp.sqrt(mp.fsum(x * x for row in self.entries for x in row))


def matrix(entries, ctx: PrecisionContext, sector: str = "full", spec=None) -> GalerkinMatrix:
    """Symmetric GalerkinMatrix from nested sequences (upper triangle mirrored)."""
    mp = ctx.mp
    n = len(entries)
    rows = [[mp.mpf(entries[min(i, j)][max(i, j)]) for j in range(n)] for i in range(n)]
    return GalerkinMatrix(spec, sector, n, tuple(tuple(r) for r in rows))


def assemble_full(table: PsiTable) -> GalerkinMatrix:
    """q[m][n] = (psi(m) - psi(n))/(m - n), q[n][n] = psi'(n), m, n in [-N, N]."""
    N = table.spec.N
    if len(table.psi) != N + 1 or len(table.psi_deriv) != N + 1:
        raise ValueError("psi table does not cover 0..N")
    dim = 2 * N + 1
    rows = [[None] * dim for _ in range(dim)]
    for i in range(dim):
        m = i - N
        pm = table.value(m)
        rows[i][i] = table.deriv(m)
        for j in range(i + 1, dim):
            n = j - N
            q = (pm - table.value(n)) / (m - n)
            rows[i][j] = q
            rows[j][i] = q
    return GalerkinMatrix(table.spec, "full", dim, tuple(tuple(r) for r in rows))


def sector_basis(N: int, sector: str, mp) -> list:
    """Columns of the orthonormal parity basis as sparse (index, coefficient) lists."""
    r = 1 / mp.sqrt(2)
    if sector == "even":
        cols = [[(N, mp.mpf(1))]]
        cols += [[(N + k, r), (N - k, r)] for k in range(1, N + 1)]
    elif sector == "odd":
        cols = [[(N + k, r), (N - k, -r)] for k in range(1, N + 1)]
    else:
        raise ValueError("sector must be 'even' or 'odd'")
    return cols


def _congruence(full: GalerkinMatrix, left, right) -> list:
    q = full.entries
    mp = full.mp
    out = []
    for a in left:
        row = []
        for b in right:
            row.append(mp.fsum(ca * cb * q[i][j] for i, ca in a for j, cb in b))
        out.append(row)
    return out


def project_sector(full: GalerkinMatrix, sector: str) -> GalerkinMatrix:
    if full.sector != "full":
        raise ValueError("projection needs the full matrix")
    N = (full.dim - 1) // 2
    mp = full.mp
    cols = sector_basis(N, sector, mp)
    dim = len(cols)
    rows = [[None] * dim for _ in range(dim)]
    q = full.entries
    for i, a in enumerate(cols):
        for j in range(i, dim):
            b = cols[j]
            v = mp.fsum(ca * cb * q[s][t] for s, ca in a for t, cb in b)
            rows[i][j] = v
            rows[j][i] = v
    return GalerkinMatrix(full.spec, sector, dim, tuple(tuple(r) for r in rows))


def cross_block(full: GalerkinMatrix) -> list:
    """Even-odd block of the full matrix in the parity basis (should vanish)."""
    N = (full.dim - 1) // 2
    mp = full.mp
    return _congruence(full, sector_basis(N, "even", mp), sector_basis(N, "odd", mp))


def even_sector(table: PsiTable) -> GalerkinMatrix:
    return project_sector(assemble_full(table), "even")


# ---------------------------------------------------------------------------
# eigenproblem


@dataclass(frozen=True)
class SpectralResult:
    eigenvalues: tuple
    eigenvectors: tuple
    smallest_positive_index: int | None
    negative_log10_magnitudes: tuple
    backward_error_bound: object
    sweeps: int = 0
    dps: int = 0

    def vector(self, i: int) -> tuple:
        return self.eigenvectors[i]


def _context_of(m: GalerkinMatrix, ctx: PrecisionContext | None) -> PrecisionContext:
    if ctx is not None:
        return ctx
    if m.spec is not None:
        return make_context(m.spec.dps)
    raise ValueError("a precision context is required for matrices without a spec")


def _sign_fix(v: list) -> list:
    big = max(range(len(v)), key=lambda i: abs(v[i]))
    return [-x for x in v] if v[big] < 0 else v


def eigensym(m: GalerkinMatrix, ctx: PrecisionContext | None = None, max_sweeps: int = 60) -> SpectralResult:
    """Full eigendecomposition by cyclic Jacobi in working-precision fixed point."""
    ctx = _context_of(m, ctx)
    mp = ctx.mp
    n = m.dim
    rows = m.entries
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise ValueError("matrix is not symmetric")
    frob = mp.sqrt(mp.fsum(mp.mpf(x) ** 2 for r in rows for x in r))
    fixed = [[ctx.to_fixed(x) for x in r] for r in rows]
    # rotations stop once every off-diagonal entry is below the working
    # precision floor, well inside eps * ||Q||_F
    tol = ctx.to_fixed(frob * ctx.work_eps * 100 / max(n, 1))
    diag, vecs, sweeps = _backend.jacobi_eigh(fixed, ctx.prec, tol, max_sweeps)
    lam = [ctx.from_fixed(d) for d in diag]
    order = sorted(range(n), key=lambda i: (lam[i], i))
    values = tuple(lam[i] for i in order)
    vectors = tuple(tuple(_sign_fix([ctx.from_fixed(vecs[r][i]) for r in range(n)])) for i in order)
    pos = next((k for k, x in enumerate(values) if x > 0), None)
    neg = tuple(sorted((float(mp.log10(-x)) for x in values if x < 0), reverse=True))
    norm2 = max(abs(values[0]), abs(values[-1])) if n else mp.mpf(0)
    return SpectralResult(values, vectors, pos, neg, ctx.eps * norm2, sweeps, ctx.dps)


def residual_norms(m: GalerkinMatrix, result: SpectralResult) -> list:
    """||Q v_i - lambda_i v_i||_2 for every eigenpair."""
    q = m.entries
    mp = m.mp
    out = []
    for lam, v in zip(result.eigenvalues, result.eigenvectors):
        r2 = mp.fsum((mp.fsum(q[i][j] * v[j] for j in range(m.dim)) - lam * v[i]) ** 2 for i in range(m.dim))
        out.append(mp.sqrt(r2))
    return out


def smallest_positive(result: SpectralResult):
    i = result.smallest_positive_index
    if i is None:
        raise ValueError("spectrum has no positive eigenvalue")
    return result.eigenvalues[i], result.eigenvectors[i], i


def negative_census(result: SpectralResult) -> list:
    return list(result.negative_log10_magnitudes)


def k_eff(v: Sequence, eps, by: str = "index") -> int:
    """Least mode index k with 1 - sum_{j<=k} v_j^2 < eps (j, k counted from 0).

    With ``by="magnitude"`` the components are first sorted by size.
    """
    mp = v[0].context
    w = [x * x for x in v]
    if by == "magnitude":
        w.sort(reverse=True)
    elif by != "index":
        raise ValueError("by must be 'index' or 'magnitude'")
    tail = mp.fsum(w)
    for k, x in enumerate(w):
        tail -= x
        if tail < eps:
            return k
    return len(w) - 1


def spectral_invariants(result: SpectralResult, t_values: Sequence = (), eps=1e-50, vector: int | None = None) -> dict:
    lam = result.eigenvalues
    mp = lam[0].context
    fro = mp.sqrt(mp.fsum(x * x for x in lam))
    i = result.smallest_positive_index if vector is None else vector
    inv = {
        "frobenius": fro,
        "bulk_trace": mp.fsum(lam[1:]),
        "logdet_abs": mp.fsum(mp.log(abs(x)) for x in lam),
        "heat_traces": [mp.fsum(mp.exp(-t * x) for x in lam) for t in t_values],
        "gap_ratio": lam[1] / lam[0] if len(lam) > 1 and lam[0] != 0 else None,
        "k_eff": k_eff(result.eigenvectors[i], eps) if i is not None else None,
    }
    return inv
