"""Truncated Weil distribution acting on the Fourier basis of [0, L].

The Galerkin entries come from one odd function

    psi(x) = (1/pi) * int_0^L sin(2 pi x (1 - y/L)) D(y) dy

where D is the truncated Weil distribution on [0, L] with three parts:

* pole:          2 cosh(y/2)
* prime powers:  -sum_{n <= c} Lambda(n) chi(n) n^{-1/2} delta(y - log n)
* archimedean:   (1/pi) int_0^T h(tau) cos(tau y) dtau,
                 h(tau) = log(q/pi) + Re digamma(a + i tau/2)

with q the modulus of the character (1 for zeta).

The archimedean h is cut off at T as a whole.  Its constant part is integrated
in closed form through Si/Ci; the digamma part is integrated on a shared
tanh-sinh grid whose node values are computed once per (dps, T, level, a).
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import _backend
from .mpkit import (
    PrecisionContext,
    QuadratureGrid,
    build_grid,
    calibrate_level,
    digamma_complex,
    integrate_on_grid,
    make_context,
    stable_phase_integral,
)

TABLE_FORMAT = 2


# ---------------------------------------------------------------------------
# characters and run parameters


@dataclass(frozen=True)
class CharacterSpec:
    kind: str
    modulus: int = 1
    values: tuple = (1,)
    parity: str = "even"
    arch_param: Fraction = Fraction(1, 4)

    def __post_init__(self):
        if self.kind not in ("zeta", "dirichlet"):
            raise ValueError("kind must be 'zeta' or 'dirichlet'")
        if self.kind == "zeta" and (self.arch_param != Fraction(1, 4) or self.modulus != 1):
            raise ValueError("zeta uses modulus 1 and arch_param 1/4")
        if len(self.values) != self.modulus:
            raise ValueError("need one value per residue class")

    def __call__(self, n: int) -> complex:
        return self.values[n % self.modulus]

    @property
    def pole(self) -> bool:
        return self.kind == "zeta"

    @property
    def digest(self) -> str:
        blob = json.dumps(
            [self.kind, self.modulus, [str(complex(v)) for v in self.values], self.parity, str(self.arch_param)]
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


ZETA = CharacterSpec("zeta")


def dirichlet_character(modulus: int, values, parity: str | None = None) -> CharacterSpec:
    """Validated Dirichlet character from its values on 0..modulus-1."""
    values = tuple(values)
    if len(values) != modulus:
        raise ValueError("need exactly %d values" % modulus)
    for n in range(modulus):
        zero = abs(values[n]) < 1e-12
        if zero != (math.gcd(n, modulus) > 1):
            raise ValueError("chi(n) must vanish exactly when gcd(n, q) > 1")
        if not zero and abs(abs(values[n]) - 1) > 1e-12:
            raise ValueError("nonzero values must be roots of unity")
    for m in range(modulus):
        for n in range(modulus):
            if abs(values[m * n % modulus] - values[m] * values[n]) > 1e-12:
                raise ValueError("values are not completely multiplicative")
    sign = values[(modulus - 1) % modulus] if modulus > 1 else 1
    detected = "even" if abs(sign - 1) < 1e-12 else "odd"
    if parity is None:
        parity = detected
    elif parity != detected:
        raise ValueError("chi(-1) says the character is %s" % detected)
    arch = Fraction(1, 4) if parity == "even" else Fraction(3, 4)
    return CharacterSpec("dirichlet", modulus, values, parity, arch)


CHI3 = dirichlet_character(3, (0, 1, -1))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        return Fraction(repr(c))
    return Fraction(c)


@dataclass(frozen=True)
class CutoffSpec:
    c: Fraction
    T: Fraction
    N: int
    dps: int
    character: CharacterSpec = ZETA

    def __init__(self, c, T, N, dps, character=ZETA):
        object.__setattr__(self, "c", _as_fraction(c))
        object.__setattr__(self, "T", _as_fraction(T))
        object.__setattr__(self, "N", int(N))
        object.__setattr__(self, "dps", int(dps))
        object.__setattr__(self, "character", character)
        if self.c <= 1:
            raise ValueError("cutoff c must exceed 1")
        if self.T <= 0 or self.N < 1:
            raise ValueError("T must be positive and N >= 1")

    @property
    def ctx(self) -> PrecisionContext:
        return make_context(self.dps)

    def L(self, ctx: PrecisionContext | None = None):
        ctx = ctx or self.ctx
        mp = ctx.mp
        return mp.log(mp.mpf(self.c.numerator) / self.c.denominator)

    def Tval(self, ctx: PrecisionContext):
        return ctx.mp.mpf(self.T.numerator) / self.T.denominator

    @property
    def key(self) -> dict:
        return {
            "c": str(self.c),
            "T": str(self.T),
            "N": self.N,
            "dps": self.dps,
            "character": self.character.digest,
        }


# ---------------------------------------------------------------------------
# prime powers


def _prime_power_base(n: int) -> int | None:
    """p if n = p^k for a prime p, else None (trial division)."""
    if n < 2:
        return None
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            return p if m == 1 else None
        p += 1
    return m


def prime_power_bases(c) -> list[tuple[int, int]]:
    """(n, p) for every prime power n = p^k <= c, ascending."""
    top = math.floor(_as_fraction(c))
    out = []
    for n in range(2, top + 1):
        p = _prime_power_base(n)
        if p is not None:
            out.append((n, p))
    return out


def prime_powers_upto(c, ctx: PrecisionContext | None = None) -> list:
    """(n, Lambda(n)) for prime powers n <= c; Lambda is mpf under ``ctx``."""
    log = ctx.mp.log if ctx is not None else math.log
    return [(n, log(p)) for n, p in prime_power_bases(c)]


# ---------------------------------------------------------------------------
# archimedean node values


def arch_constant(character, ctx: PrecisionContext):
    """Constant part log(q/pi) of h."""
    mp = ctx.mp
    return mp.log(character.modulus) - mp.log(mp.pi)


def h_plus(tau, arch_param, ctx: PrecisionContext, modulus: int = 1):
    mp = ctx.mp
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    a = mp.mpf(Fraction(arch_param).numerator) / Fraction(arch_param).denominator
    return mp.log(modulus) - mp.log(mp.pi) + digamma_complex(mp.mpc(a, mp.mpf(tau) / 2), ctx).real


def _re_digamma_nodes(args) -> list:
    dps, arch, taus = args
    ctx = make_context(dps)
    mp = ctx.mp
    a = mp.mpf(arch.numerator) / arch.denominator
    out = []
    for t in taus:
        z = mp.mpc(a, mp.make_mpf(t) / 2)
        out.append(digamma_complex(z, ctx).real._mpf_)
    return out


# node values keyed by (work_dps, T, arch) -> {abscissa mpf tuple: Re digamma}
_NODE_VALUES: dict[tuple, dict] = {}


def _node_values(grid: QuadratureGrid, arch: Fraction, ctx: PrecisionContext, jobs: int = 1) -> tuple:
    key = (ctx.work_dps, grid.interval[1]._mpf_, arch)
    store = _NODE_VALUES.setdefault(key, {})
    missing = [x._mpf_ for x in grid.abscissae if x._mpf_ not in store]
    if missing:
        if jobs > 1 and len(missing) > 64:
            size = -(-len(missing) // (4 * jobs))
            chunks = [missing[i : i + size] for i in range(0, len(missing), size)]
            with ProcessPoolExecutor(jobs) as pool:
                parts = list(pool.map(_re_digamma_nodes, [(ctx.dps, arch, ch) for ch in chunks]))
            values = [v for part in parts for v in part]
        else:
            values = _re_digamma_nodes((ctx.dps, arch, missing))
        for x, v in zip(missing, values):
            store[x] = v
    mp = ctx.mp
    return tuple(mp.make_mpf(store[x._mpf_]) for x in grid.abscissae)


@dataclass(frozen=True)
class ArchCache:
    """Re digamma(a + i tau/2) at the nodes of a tanh-sinh grid on (0, T)."""

    grid: QuadratureGrid
    arch_param: Fraction
    values: tuple
    digest: str


def arch_cache(T, arch_param, level: int, ctx: PrecisionContext, jobs: int = 1) -> ArchCache:
    mp = ctx.mp
    T = _as_fraction(T)
    grid = build_grid(0, mp.mpf(T.numerator) / T.denominator, level, ctx)
    arch = Fraction(arch_param)
    values = _node_values(grid, arch, ctx, jobs)
    h = hashlib.sha256()
    h.update(("%s|%s|%d|%d|" % (T, arch, level, ctx.dps)).encode())
    for v in values:
        h.update(format(ctx.to_fixed(v), "x").encode())
        h.update(b",")
    return ArchCache(grid, arch, values, h.hexdigest()[:16])


def _digamma_sums(cache: ArchCache, L, ns, ctx: PrecisionContext, jobs: int = 1):
    """Fixed-point sums giving the digamma part of psi(n) and psi'(n)."""
    mp = ctx.mp
    prec = ctx.prec
    taus = cache.grid.abscissae
    # (1 - cos tau L) / tau^2 stays O(L^2) as tau -> 0, so these are well
    # scaled for fixed point even at nodes next to the endpoint
    g = [
        ctx.to_fixed(w * v * 2 * (mp.sin(t * L / 2) / t) ** 2)
        for t, w, v in zip(taus, cache.grid.weights, cache.values)
    ]
    tf = [ctx.to_fixed(t) for t in taus]
    two_pi_over_L = 2 * mp.pi / L
    af = [ctx.to_fixed(n * two_pi_over_L) for n in ns]
    if jobs > 1 and len(af) > jobs:
        size = -(-len(af) // jobs)
        chunks = [af[i : i + size] for i in range(0, len(af), size)]
        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(_pole_sums_job, [(g, tf, ch, prec) for ch in chunks]))
        s = [x for part in parts for x in part[0]]
        sp = [x for part in parts for x in part[1]]
    else:
        s, sp = _backend.pole_sums(g, tf, af, prec)
    pi2 = mp.pi ** 2
    psi = [n * two_pi_over_L / pi2 * ctx.from_fixed(v) for n, v in zip(ns, s)]
    dpsi = [ctx.from_fixed(v) / (mp.pi * L) for v in sp]
    return psi, dpsi


def _pole_sums_job(args):
    return _backend.pole_sums(*args)


# ---------------------------------------------------------------------------
# closed-form pieces


def _cin(z, mp):
    """Cin(z) = int_0^z (1 - cos t)/t dt (even, entire)."""
    z = abs(z)
    if z < 1:
        total = mp.mpf(0)
        z2 = z * z
        term = -mp.mpf(1)
        k = 1
        while True:
            term *= -z2 / ((2 * k - 1) * (2 * k))
            t = term / (2 * k)
            total += t
            if abs(t) < mp.eps * abs(total):
                return total
            k += 1
    return mp.euler + mp.log(z) - mp.ci(z)


def psi_logpi_piece(x, spec: CutoffSpec, ctx: PrecisionContext):
    """Contribution of the constant log(q/pi) of h, truncated at T."""
    mp = ctx.mp
    x = mp.mpf(x)
    if x == 0:
        return mp.mpf(0)
    L = spec.L(ctx)
    TL = spec.Tval(ctx) * L
    A = 2 * mp.pi * x
    bracket = mp.sin(A) * (mp.si(TL - A) + mp.si(TL + A)) + mp.cos(A) * (_cin(TL - A, mp) - _cin(TL + A, mp))
    return arch_constant(spec.character, ctx) / (2 * mp.pi ** 2) * bracket


def psi_logpi_deriv(n: int, spec: CutoffSpec, ctx: PrecisionContext):
    mp = ctx.mp
    L = spec.L(ctx)
    TL = spec.Tval(ctx) * L
    A = 2 * mp.pi * n
    one_minus_cos = 2 * mp.sin(TL / 2) ** 2
    val = mp.si(TL + A) + mp.si(TL - A) - one_minus_cos * (1 / (TL + A) + 1 / (TL - A))
    return arch_constant(spec.character, ctx) / mp.pi * val


def psi_digamma_piece(x, spec: CutoffSpec, cache: ArchCache, ctx: PrecisionContext):
    """Digamma part of the archimedean contribution at real x (node quadrature)."""
    mp = ctx.mp
    x = mp.mpf(x)
    if x == 0:
        return mp.mpf(0)
    L = spec.L(ctx)
    A = 2 * mp.pi * x
    a = A / L
    eA = mp.expjpi(2 * x)
    vals = []
    for t, h in zip(cache.grid.abscissae, cache.values):
        phi = stable_phase_integral(t - a, L, ctx) + stable_phase_integral(-t - a, L, ctx)
        vals.append(h * (eA * phi).imag)
    return integrate_on_grid(vals, cache.grid) / (2 * mp.pi ** 2)


def psi_arch_piece(x, spec: CutoffSpec, hplus_values, grid: QuadratureGrid, ctx: PrecisionContext):
    """Archimedean contribution: closed-form log(q/pi) part plus node quadrature."""
    if len(hplus_values) != len(grid):
        raise ValueError("h+ values are not aligned with the grid")
    cache = ArchCache(grid, spec.character.arch_param, tuple(hplus_values), "")
    return psi_logpi_piece(x, spec, ctx) + psi_digamma_piece(x, spec, cache, ctx)


def psi_pole_piece(x, spec: CutoffSpec, ctx: PrecisionContext):
    mp = ctx.mp
    x = mp.mpf(x)
    if not spec.character.pole or x == 0:
        return mp.mpf(0)
    L = spec.L(ctx)
    A = 2 * mp.pi * x
    a = A / L
    sA = mp.sin(A)
    cA = mp.cos(A)
    total = mp.mpf(0)
    for s in (mp.mpf(0.5), mp.mpf(-0.5)):
        total += (a * mp.exp(s * L) - a * cA - s * sA) / (s * s + a * a)
    return total / mp.pi


def psi_pole_deriv(x, spec: CutoffSpec, ctx: PrecisionContext):
    mp = ctx.mp
    x = mp.mpf(x)
    if not spec.character.pole:
        return mp.mpf(0)
    L = spec.L(ctx)
    A = 2 * mp.pi * x
    a = A / L
    da = 2 * mp.pi / L
    dA = 2 * mp.pi
    sA = mp.sin(A)
    cA = mp.cos(A)
    total = mp.mpf(0)
    for s in (mp.mpf(0.5), mp.mpf(-0.5)):
        num = a * mp.exp(s * L) - a * cA - s * sA
        dnum = da * (mp.exp(s * L) - cA) + a * dA * sA - s * dA * cA
        den = s * s + a * a
        total += (dnum * den - num * 2 * a * da) / (den * den)
    return total / mp.pi


def _prime_terms(spec: CutoffSpec, ctx: PrecisionContext):
    mp = ctx.mp
    L = spec.L(ctx)
    out = []
    for n, p in prime_power_bases(spec.c):
        chi = complex(spec.character(n)).real
        if chi == 0:
            continue
        w = mp.log(p) / mp.sqrt(n) * mp.mpf(chi)
        out.append((w, 1 - mp.log(n) / L))
    return out


def psi_prime_piece(x, spec: CutoffSpec, ctx: PrecisionContext):
    mp = ctx.mp
    x = mp.mpf(x)
    total = mp.mpf(0)
    for w, r in _prime_terms(spec, ctx):
        total += w * mp.sin(2 * mp.pi * x * r)
    return -total / mp.pi


def psi_prime_deriv(x, spec: CutoffSpec, ctx: PrecisionContext):
    mp = ctx.mp
    x = mp.mpf(x)
    total = mp.mpf(0)
    for w, r in _prime_terms(spec, ctx):
        total += w * r * mp.cos(2 * mp.pi * x * r)
    return -2 * total


# ---------------------------------------------------------------------------
# calibration and caches


_LEVELS: dict[tuple, int] = {}


def calibrated_level(spec: CutoffSpec, jobs: int = 1, start: int = 6) -> int:
    """Grid level at which the highest-frequency psi entries have settled."""
    key = (spec.dps, spec.T, spec.character.arch_param, spec.c, spec.N)
    if key in _LEVELS:
        return _LEVELS[key]
    ctx = spec.ctx
    L = spec.L(ctx)
    arch = spec.character.arch_param
    probes = sorted({1, max(1, spec.N // 2), spec.N})

    def estimate(grid):
        level = grid.level
        cache = arch_cache(spec.T, arch, level, ctx, jobs)
        psi, dpsi = _digamma_sums(cache, L, probes, ctx)
        return psi + dpsi + [integrate_on_grid(cache.values, cache.grid)]

    level = calibrate_level(estimate, 0, spec.Tval(ctx), ctx, start=start)
    _LEVELS[key] = level
    return level


@dataclass(frozen=True)
class PsiTable:
    spec: CutoffSpec
    psi: tuple
    psi_deriv: tuple
    hplus_cache_digest: str
    level: int
    pieces: dict = field(default_factory=dict, compare=False, repr=False)

    def value(self, n: int):
        """psi(n) for |n| <= N, extended by oddness."""
        return self.psi[n] if n >= 0 else -self.psi[-n]

    def deriv(self, n: int):
        return self.psi_deriv[abs(n)]

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(json.dumps(self.spec.key, sort_keys=True).encode())
        h.update(self.hplus_cache_digest.encode())
        for v in self.psi + self.psi_deriv:
            h.update(repr(v._mpf_).encode())
        return h.hexdigest()[:16]


class PsiCaches:
    """Grid and node values needed to evaluate psi at arbitrary real x."""

    def __init__(self, spec: CutoffSpec, level: int | None = None, jobs: int = 1):
        self.spec = spec
        self.ctx = spec.ctx
        self.level = level if level is not None else calibrated_level(spec, jobs)
        self.arch = arch_cache(spec.T, spec.character.arch_param, self.level, self.ctx, jobs)

    @property
    def grid(self) -> QuadratureGrid:
        return self.arch.grid


def psi(x, spec: CutoffSpec, caches: PsiCaches):
    ctx = caches.ctx
    return (
        psi_logpi_piece(x, spec, ctx)
        + psi_digamma_piece(x, spec, caches.arch, ctx)
        + psi_pole_piece(x, spec, ctx)
        + psi_prime_piece(x, spec, ctx)
    )


def psi_deriv(n: int, spec: CutoffSpec, caches: PsiCaches):
    ctx = caches.ctx
    n = abs(int(n))
    _, dpsi = _digamma_sums(caches.arch, spec.L(ctx), [n], ctx)
    return dpsi[0] + psi_logpi_deriv(n, spec, ctx) + psi_pole_deriv(n, spec, ctx) + psi_prime_deriv(n, spec, ctx)


def build_psi_table(
    spec: CutoffSpec,
    jobs: int = 1,
    level: int | None = None,
    cache_dir: str | None = None,
) -> PsiTable:
    """psi(n) and psi'(n) for n = 0..N from one shared set of node values."""
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    if cache_dir is not None:
        found = load_psi_table(spec, cache_dir, level)
        if found is not None:
            return found
    caches = PsiCaches(spec, level, jobs)
    ctx = caches.ctx
    mp = ctx.mp
    ns = list(range(spec.N + 1))
    dig, ddig = _digamma_sums(caches.arch, spec.L(ctx), ns, ctx, jobs)
    zero = mp.mpf(0)
    logpi = [zero] + [psi_logpi_piece(n, spec, ctx) for n in ns[1:]]
    dlogpi = [psi_logpi_deriv(n, spec, ctx) for n in ns]
    pole = [zero] + [psi_pole_piece(n, spec, ctx) for n in ns[1:]]
    dpole = [psi_pole_deriv(n, spec, ctx) for n in ns]
    prime = [zero] + [psi_prime_piece(n, spec, ctx) for n in ns[1:]]
    dprime = [psi_prime_deriv(n, spec, ctx) for n in ns]
    values = [zero] + [dig[n] + logpi[n] + pole[n] + prime[n] for n in ns[1:]]
    derivs = [ddig[n] + dlogpi[n] + dpole[n] + dprime[n] for n in ns]
    pieces = {
        "digamma": (tuple(dig), tuple(ddig)),
        "logpi": (tuple(logpi), tuple(dlogpi)),
        "pole": (tuple(pole), tuple(dpole)),
        "prime": (tuple(prime), tuple(dprime)),
    }
    table = PsiTable(spec, tuple(values), tuple(derivs), caches.arch.digest, caches.level, pieces)
    if cache_dir is not None:
        save_psi_table(table, cache_dir)
    return table


# ---------------------------------------------------------------------------
# disk cache


def _table_path(spec: CutoffSpec, cache_dir: str, level: int | None) -> str:
    k = spec.key
    name = "psi_c%s_N%d_T%s_dps%d_%s" % (k["c"].replace("/", "o"), k["N"], k["T"].replace("/", "o"), k["dps"], k["character"])
    if level is not None:
        name += "_l%d" % level
    return os.path.join(cache_dir, name + ".json")


def save_psi_table(table: PsiTable, cache_dir: str) -> str:
    os.makedirs(cache_dir, exist_ok=True)
    ctx = table.spec.ctx
    doc = {
        "format": TABLE_FORMAT,
        "spec": table.spec.key,
        "level": table.level,
        "hplus_cache_digest": table.hplus_cache_digest,
        "psi": [ctx.nstr(v) for v in table.psi],
        "psi_deriv": [ctx.nstr(v) for v in table.psi_deriv],
    }
    path = _table_path(table.spec, cache_dir, None)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(doc, fh)
    os.replace(tmp, path)
    return path


def load_psi_table(spec: CutoffSpec, cache_dir: str, level: int | None = None) -> PsiTable | None:
    path = _table_path(spec, cache_dir, None)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != TABLE_FORMAT or doc.get("spec") != spec.key:
        return None
    if level is not None and doc["level"] != level:
        return None
    mp = spec.ctx.mp
    return PsiTable(
        spec,
        tuple(mp.mpf(s) for s in doc["psi"]),
        tuple(mp.mpf(s) for s in doc["psi_deriv"]),
        doc["hplus_cache_digest"],
        doc["level"],
    )
