# cython: language_level=3, boundscheck=False, wraparound=False
"""GMP-backed fixed-point kernels.

Mirrors ``_pykernels`` operation for operation (floor shifts, floor
division, floor square roots) so both backends return identical integers.
"""

from libc.stdlib cimport malloc, free

NAME = "cython-gmp"


cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    ctypedef __mpz_struct *mpz_ptr

    void mpz_init(mpz_ptr)
    void mpz_clear(mpz_ptr)
    void mpz_set(mpz_ptr, mpz_ptr)
    void mpz_set_ui(mpz_ptr, unsigned long)
    int mpz_set_str(mpz_ptr, const char *, int)
    char *mpz_get_str(char *, int, mpz_ptr)
    void mpz_add(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_sub(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_mul(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_addmul(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_submul(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_neg(mpz_ptr, mpz_ptr)
    void mpz_abs(mpz_ptr, mpz_ptr)
    void mpz_mul_2exp(mpz_ptr, mpz_ptr, unsigned long)
    void mpz_fdiv_q_2exp(mpz_ptr, mpz_ptr, unsigned long)
    void mpz_fdiv_q(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_tdiv_q_ui(mpz_ptr, mpz_ptr, unsigned long)
    void mpz_sqrt(mpz_ptr, mpz_ptr)
    int mpz_sgn(mpz_ptr)
    int mpz_cmp(mpz_ptr, mpz_ptr)
    int mpz_cmpabs(mpz_ptr, mpz_ptr)
    size_t mpz_sizeinbase(mpz_ptr, int)


cdef void _set(mpz_ptr z, object x):
    cdef bytes b = format(x, "x").encode("ascii")
    mpz_set_str(z, b, 16)


cdef object _get(mpz_ptr z):
    cdef char *buf = <char *> malloc(mpz_sizeinbase(z, 16) + 2)
    if buf == NULL:
        raise MemoryError()
    try:
        mpz_get_str(buf, 16, z)
        return int(buf, 16)
    finally:
        free(buf)


cdef class _Buf:
    """Owner of a contiguous array of initialised mpz_t values."""
    cdef __mpz_struct *z
    cdef Py_ssize_t n

    def __cinit__(self, Py_ssize_t n):
        cdef Py_ssize_t i
        self.z = <__mpz_struct *> malloc(max(n, 1) * sizeof(__mpz_struct))
        if self.z == NULL:
            raise MemoryError()
        for i in range(n):
            mpz_init(&self.z[i])
        self.n = n

    def __dealloc__(self):
        cdef Py_ssize_t i
        if self.z != NULL:
            for i in range(self.n):
                mpz_clear(&self.z[i])
            free(self.z)


def pole_sums(gvals, taus, avals, unsigned long prec):
    cdef Py_ssize_t m = len(gvals), k, j
    cdef _Buf t = _Buf(m), t2 = _Buf(m), gt2 = _Buf(m)
    cdef mpz_t a, a2, s, sp, dm, dp, d, total, tmp
    mpz_init(a); mpz_init(a2); mpz_init(s); mpz_init(sp); mpz_init(dm)
    mpz_init(dp); mpz_init(d); mpz_init(total); mpz_init(tmp)
    s_out = []
    sp_out = []
    try:
        mpz_set_ui(total, 0)
        for j in range(m):
            _set(tmp, gvals[j])
            mpz_add(total, total, tmp)
            _set(&t.z[j], taus[j])
            mpz_mul(&t2.z[j], &t.z[j], &t.z[j])
            mpz_mul(&gt2.z[j], tmp, &t2.z[j])
        for k in range(len(avals)):
            _set(a, avals[k])
            if mpz_sgn(a) == 0:
                s_out.append(_get(total))
                mpz_mul_2exp(tmp, total, 1)
                sp_out.append(_get(tmp))
                continue
            mpz_mul(a2, a, a)
            mpz_set_ui(s, 0)
            mpz_set_ui(sp, 0)
            for j in range(m):
                mpz_sub(dm, &t.z[j], a)
                if mpz_sgn(dm) == 0:
                    continue
                mpz_add(dp, &t.z[j], a)
                mpz_sub(d, &t2.z[j], a2)
                mpz_fdiv_q(tmp, &gt2.z[j], d)
                mpz_add(s, s, tmp)
                mpz_mul(d, dm, dm)
                mpz_fdiv_q(tmp, &gt2.z[j], d)
                mpz_add(sp, sp, tmp)
                mpz_mul(d, dp, dp)
                mpz_fdiv_q(tmp, &gt2.z[j], d)
                mpz_add(sp, sp, tmp)
            s_out.append(_get(s))
            sp_out.append(_get(sp))
    finally:
        mpz_clear(a); mpz_clear(a2); mpz_clear(s); mpz_clear(sp); mpz_clear(dm)
        mpz_clear(dp); mpz_clear(d); mpz_clear(total); mpz_clear(tmp)
    return s_out, sp_out


def jacobi_eigh(a, unsigned long prec, tol, int max_sweeps=60):
    cdef Py_ssize_t n = len(a), i, j, p, q, r
    cdef _Buf A = _Buf(n * n), V = _Buf(n * n)
    cdef mpz_t one, one2, total, thresh, ztol, d, e, ae, ad, t, c, s, tp, x, y, w
    cdef int sweep, rotated
    cdef __mpz_struct *arp
    cdef __mpz_struct *arq
    mpz_init(one); mpz_init(one2); mpz_init(total); mpz_init(thresh)
    mpz_init(ztol); mpz_init(d); mpz_init(e); mpz_init(ae); mpz_init(ad)
    mpz_init(t); mpz_init(c); mpz_init(s); mpz_init(tp); mpz_init(x)
    mpz_init(y); mpz_init(w)
    try:
        for i in range(n):
            row = a[i]
            for j in range(n):
                _set(&A.z[i * n + j], row[j])
        mpz_set_ui(one, 1)
        mpz_mul_2exp(one, one, prec)
        mpz_mul_2exp(one2, one, prec)
        for i in range(n):
            mpz_set(&V.z[i * n + i], one)
        _set(ztol, tol)
        for sweep in range(max_sweeps):
            mpz_set_ui(total, 0)
            for p in range(n - 1):
                for q in range(p + 1, n):
                    mpz_abs(x, &A.z[p * n + q])
                    mpz_add(total, total, x)
            if mpz_sgn(total) == 0:
                diag, vec = _finish(A, V, n)
                return diag, vec, sweep
            if sweep < 3:
                mpz_tdiv_q_ui(thresh, total, 5 * n * n)
            else:
                mpz_set_ui(thresh, 0)
            rotated = 0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    mpz_abs(x, &A.z[p * n + q])
                    if mpz_cmp(x, ztol) <= 0 or mpz_cmp(x, thresh) <= 0:
                        continue
                    rotated += 1
                    # t = sign * (|e| << prec) // (|d| + isqrt(d*d + e*e))
                    mpz_sub(d, &A.z[q * n + q], &A.z[p * n + p])
                    mpz_mul_2exp(e, &A.z[p * n + q], 1)
                    mpz_abs(ae, e)
                    mpz_abs(ad, d)
                    mpz_mul(w, d, d)
                    mpz_addmul(w, e, e)
                    mpz_sqrt(w, w)
                    mpz_add(w, w, ad)
                    mpz_mul_2exp(t, ae, prec)
                    mpz_fdiv_q(t, t, w)
                    if mpz_sgn(d) != 0 and ((mpz_sgn(d) < 0) != (mpz_sgn(&A.z[p * n + q]) < 0)):
                        mpz_neg(t, t)
                    # c = (one << prec) // isqrt((one << prec) + t*t)
                    mpz_mul(w, t, t)
                    mpz_add(w, w, one2)
                    mpz_sqrt(w, w)
                    mpz_fdiv_q(c, one2, w)
                    mpz_mul(s, t, c)
                    mpz_fdiv_q_2exp(s, s, prec)
                    mpz_mul(tp, t, &A.z[p * n + q])
                    mpz_fdiv_q_2exp(tp, tp, prec)
                    mpz_sub(&A.z[p * n + p], &A.z[p * n + p], tp)
                    mpz_add(&A.z[q * n + q], &A.z[q * n + q], tp)
                    mpz_set_ui(&A.z[p * n + q], 0)
                    mpz_set_ui(&A.z[q * n + p], 0)
                    for r in range(n):
                        if r == p or r == q:
                            continue
                        arp = &A.z[r * n + p]
                        arq = &A.z[r * n + q]
                        mpz_mul(x, c, arp)
                        mpz_submul(x, s, arq)
                        mpz_fdiv_q_2exp(x, x, prec)
                        mpz_mul(y, s, arp)
                        mpz_addmul(y, c, arq)
                        mpz_fdiv_q_2exp(y, y, prec)
                        mpz_set(arp, x)
                        mpz_set(arq, y)
                        mpz_set(&A.z[p * n + r], x)
                        mpz_set(&A.z[q * n + r], y)
                    for r in range(n):
                        arp = &V.z[r * n + p]
                        arq = &V.z[r * n + q]
                        mpz_mul(x, c, arp)
                        mpz_submul(x, s, arq)
                        mpz_fdiv_q_2exp(x, x, prec)
                        mpz_mul(y, s, arp)
                        mpz_addmul(y, c, arq)
                        mpz_fdiv_q_2exp(y, y, prec)
                        mpz_set(arp, x)
                        mpz_set(arq, y)
            if rotated == 0:
                diag, vec = _finish(A, V, n)
                return diag, vec, sweep + 1
        raise RuntimeError("Jacobi iteration did not converge in %d sweeps" % max_sweeps)
    finally:
        mpz_clear(one); mpz_clear(one2); mpz_clear(total); mpz_clear(thresh)
        mpz_clear(ztol); mpz_clear(d); mpz_clear(e); mpz_clear(ae); mpz_clear(ad)
        mpz_clear(t); mpz_clear(c); mpz_clear(s); mpz_clear(tp); mpz_clear(x)
        mpz_clear(y); mpz_clear(w)


cdef object _finish(_Buf A, _Buf V, Py_ssize_t n):
    cdef Py_ssize_t i, j
    diag = [_get(&A.z[i * n + i]) for i in range(n)]
    vec = [[_get(&V.z[i * n + j]) for j in range(n)] for i in range(n)]
    return diag, vec
