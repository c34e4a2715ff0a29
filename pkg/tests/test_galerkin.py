import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from truncweil import _pykernels
from truncweil.galerkin import (
    assemble_full,
    cross_block,
    eigensym,
    k_eff,
    matrix,
    negative_census,
    project_sector,
    residual_norms,
    smallest_positive,
    spectral_invariants,
)
from truncweil.mpkit import make_context
from truncweil.weil_kernel import CutoffSpec, build_psi_table

try:
    from truncweil import _ckernels
except ImportError:  # pure-Python install
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")

CTX = make_context(30)


def sym_matrices(max_n=7):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(
            st.lists(st.floats(-10, 10, allow_nan=False), min_size=n, max_size=n), min_size=n, max_size=n
        )
    )


@settings(max_examples=40, deadline=None)
@given(a=sym_matrices())
def test_backward_error_and_orthonormality(a):
    m = matrix(a, CTX)
    res = eigensym(m, CTX)
    scale = max(m.frobenius(), CTX.mpf(1))
    assert max(residual_norms(m, res)) <= 10 * CTX.eps * scale
    mp = CTX.mp
    V = res.eigenvectors
    for i in range(m.dim):
        for j in range(i, m.dim):
            dot = mp.fsum(x * y for x, y in zip(V[i], V[j]))
            assert abs(dot - (1 if i == j else 0)) <= 10 * CTX.eps
    assert list(res.eigenvalues) == sorted(res.eigenvalues)


@settings(max_examples=20, deadline=None)
@given(a=sym_matrices())
def test_eigenvalues_agree_with_numpy(a):
    m = matrix(a, CTX)
    sym = np.array([[float(x) for x in r] for r in m.entries])
    got = [float(x) for x in eigensym(m, CTX).eigenvalues]
    assert np.allclose(got, np.linalg.eigvalsh(sym), atol=1e-9 * max(1, np.abs(sym).max()))


def test_sign_convention():
    m = matrix([[2, 1], [1, 2]], CTX)
    for v in eigensym(m, CTX).eigenvectors:
        big = max(v, key=abs)
        assert big > 0


def test_rejects_asymmetric():
    from truncweil.galerkin import GalerkinMatrix

    mp = CTX.mp
    m = GalerkinMatrix(None, "full", 2, ((mp.mpf(1), mp.mpf(2)), (mp.mpf(3), mp.mpf(1))))
    with pytest.raises(ValueError):
        eigensym(m, CTX)
    with pytest.raises(ValueError):
        eigensym(m)


def test_diag_invariants():
    res = eigensym(matrix([[1, 0], [0, 1]], CTX), CTX)
    inv = spectral_invariants(res, t_values=[0, 1])
    mp = CTX.mp
    assert abs(inv["frobenius"] - mp.sqrt(2)) <= CTX.eps
    assert inv["bulk_trace"] == 1
    assert inv["logdet_abs"] == 0
    assert inv["gap_ratio"] == 1
    assert inv["heat_traces"][0] == 2
    assert abs(inv["heat_traces"][1] - 2 * mp.exp(-1)) <= CTX.eps


def test_negative_spectrum_bookkeeping():
    res = eigensym(matrix([[-1e-20, 0, 0], [0, -3, 0], [0, 0, 5]], CTX), CTX)
    assert res.smallest_positive_index == 2
    assert negative_census(res) == pytest.approx([float(np.log10(3)), -20])
    lam, _, i = smallest_positive(res)
    assert lam == 5 and i == 2
    none = eigensym(matrix([[-1]], CTX), CTX)
    with pytest.raises(ValueError):
        smallest_positive(none)


def test_k_eff():
    mp = CTX.mp
    r = 1 / mp.sqrt(2)
    z = mp.mpf(0)
    assert k_eff([r, r, z, z], mp.mpf("1e-25")) == 1
    assert k_eff([z, z, r, r], mp.mpf("1e-25")) == 3
    assert k_eff([z, z, r, r], mp.mpf("1e-25"), by="magnitude") == 1
    assert k_eff([mp.mpf(1)], mp.mpf("1e-25")) == 0
    with pytest.raises(ValueError):
        k_eff([r, r], 1e-10, by="bogus")


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(2, 6),
    seed=st.integers(0, 2**32 - 1),
    prec=st.sampled_from([64, 120, 200]),
)
@needs_ext
def test_jacobi_backends_bitwise(n, seed, prec):
    rng = np.random.default_rng(seed)
    a = rng.integers(-(1 << 40), 1 << 40, size=(n, n))
    a = [[int(a[min(i, j)][max(i, j)]) << (prec - 40) for j in range(n)] for i in range(n)]
    tol = 1 << 8
    assert _pykernels.jacobi_eigh(a, prec, tol) == _ckernels.jacobi_eigh(a, prec, tol)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), prec=st.sampled_from([64, 150, 300]))
@needs_ext
def test_pole_sums_backends_bitwise(seed, prec):
    rng = np.random.default_rng(seed)
    one = 1 << prec
    taus = sorted(int(x * one) for x in rng.uniform(0.01, 40, 30))
    g = [int(x * one) for x in rng.normal(0, 1, 30)]
    avals = [0] + [int(x * one) for x in rng.uniform(0.1, 40, 5)]
    assert _pykernels.pole_sums(g, taus, avals, prec) == _ckernels.pole_sums(g, taus, avals, prec)


def test_jacobi_budget():
    a = [[1 << 60, 1 << 59], [1 << 59, 0]]
    with pytest.raises(RuntimeError):
        _pykernels.jacobi_eigh(a, 60, 0, max_sweeps=0)


@pytest.fixture(scope="module")
def small_full():
    return assemble_full(build_psi_table(CutoffSpec(7, 30, 5, 30)))


def test_full_matrix_structure(small_full):
    q = small_full.entries
    N = 5
    assert small_full.dim == 2 * N + 1
    for i in range(small_full.dim):
        for j in range(small_full.dim):
            assert q[i][j] == q[j][i]
            # psi odd makes q invariant under (m, n) -> (-m, -n)
            assert q[i][j] == q[2 * N - i][2 * N - j]


def test_parity_sectors_split_the_spectrum(small_full):
    ctx = small_full.spec.ctx
    even = project_sector(small_full, "even")
    odd = project_sector(small_full, "odd")
    assert even.dim == 6 and odd.dim == 5
    cb = cross_block(small_full)
    assert max(abs(x) for r in cb for x in r) <= ctx.eps * small_full.frobenius()
    full = eigensym(small_full).eigenvalues
    split = sorted(eigensym(even).eigenvalues + eigensym(odd).eigenvalues)
    for a, b in zip(full, split):
        assert abs(a - b) <= 10 * ctx.eps * small_full.frobenius()
    with pytest.raises(ValueError):
        project_sector(even, "even")


@settings(max_examples=30, deadline=None)
@given(a=sym_matrices())
def test_jacobi_preserves_frobenius(a):
    m = matrix(a, CTX)
    res = eigensym(m, CTX)
    mp = CTX.mp
    f2 = m.frobenius() ** 2
    assert abs(mp.fsum(x**2 for x in res.eigenvalues) - f2) <= 10 * CTX.eps * max(f2, 1)


@settings(max_examples=20, deadline=None)
@given(a=sym_matrices(), data=st.data())
def test_selection_stable_under_reordering(a, data):
    n = len(a)
    perm = data.draw(st.permutations(range(n)))
    flips = data.draw(st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n))
    m = matrix(a, CTX)
    # P Q P^T with a signed permutation P reorders the basis and flips signs
    pq = matrix([[flips[i] * flips[j] * m.entries[perm[i]][perm[j]] for j in range(n)] for i in range(n)], CTX)
    r1, r2 = eigensym(m, CTX), eigensym(pq, CTX)
    if r1.smallest_positive_index is None:
        assert r2.smallest_positive_index is None
        return
    l1, v1, _ = smallest_positive(r1)
    l2, v2, _ = smallest_positive(r2)
    assert abs(l1 - l2) <= 10 * CTX.eps * max(m.frobenius(), 1)
    gap = min((abs(x - l1) for x in r1.eigenvalues if x != l1), default=1)
    if gap > 1e-6:
        back = [flips[i] * v2[i] for i in range(n)]
        mapped = [0] * n
        for i in range(n):
            mapped[perm[i]] = back[i]
        s = 1 if CTX.mp.fsum(x * y for x, y in zip(mapped, v1)) > 0 else -1
        assert max(abs(s * x - y) for x, y in zip(mapped, v1)) <= 1e-20
