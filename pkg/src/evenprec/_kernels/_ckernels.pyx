# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same signatures and results as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, fabs, exp, log, lgamma, M_PI

cnp.import_array()


def classical_scores(a0, phi0, int K, double delta):
    cdef const double[::1] a = np.ascontiguousarray(a0, dtype=np.float64)
    cdef const double[::1] ph = np.ascontiguousarray(phi0, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], i
    cdef int k, acc
    cdef double half = 0.5 * delta, c0, s0, v, margin
    ck_a = np.cos(np.pi * np.arange(K) / K)
    sk_a = np.sin(np.pi * np.arange(K) / K)
    cdef const double[::1] ck = ck_a, sk = sk_a
    out = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    with nogil:
        for i in range(n):
            # screen with the addition formula (one cos/sin pair per state); points
            # near the window edge are decided by the same expression the numpy
            # backend uses so both backends agree on ties
            c0 = a[i] * cos(ph[i])
            s0 = a[i] * sin(ph[i])
            margin = 1e-12 * a[i] + 1e-300
            acc = 0
            for k in range(K):
                v = fabs(c0 * ck[k] - s0 * sk[k]) - half
                if v > margin:
                    continue
                if v < -margin or fabs(a[i] * cos(M_PI * k / K + ph[i])) <= half:
                    acc += 1 if k % 2 == 0 else -1
            o[i] = acc
    return out


DEF TILE = 512


cdef void _tile(const double[:, ::1] cr, const double[:, ::1] ci, const double[:, ::1] up,
                const double[:, ::1] down, const double[::1] lg, const int[::1] active,
                Py_ssize_t dim, const double *z, const double *phi, Py_ssize_t cnt,
                double *out) noexcept nogil:
    # diagonal d holds (-1)^n rho[n+d, n]; the recurrence
    # g_{n+1} = ((2n+1+d-z) g_n - up[d,n] g_{n-1}) * down[d,n] runs across the tile
    # so consecutive points are independent and the inner loop vectorizes
    cdef double g_prev[TILE]
    cdef double g[TILE]
    cdef double pre[TILE]
    cdef double pim[TILE]
    cdef double logz[TILE]
    cdef double g_next, c_re, c_im, u, w, b
    cdef Py_ssize_t d, n, m, t
    for t in range(cnt):
        out[t] = 0.0
        logz[t] = log(z[t]) if z[t] > 0 else -1e300
    for d in range(dim):
        if not active[d]:
            continue
        m = dim - d
        for t in range(cnt):
            if d == 0:
                g_prev[t] = exp(-0.5 * z[t])
            else:
                g_prev[t] = exp(0.5 * d * logz[t] - 0.5 * z[t] - lg[d])
            pre[t] = cr[d, 0] * g_prev[t]
            pim[t] = ci[d, 0] * g_prev[t]
        if m > 1:
            b = down[d, 0]
            for t in range(cnt):
                g[t] = (1.0 + d - z[t]) * g_prev[t] * b
            for n in range(1, m):
                c_re = cr[d, n]
                c_im = ci[d, n]
                for t in range(cnt):
                    pre[t] += c_re * g[t]
                    pim[t] += c_im * g[t]
                if n + 1 < m:
                    u = up[d, n]
                    w = 2 * n + 1 + d
                    b = down[d, n]
                    for t in range(cnt):
                        g_next = ((w - z[t]) * g[t] - u * g_prev[t]) * b
                        g_prev[t] = g[t]
                        g[t] = g_next
        for t in range(cnt):
            if d == 0:
                out[t] += pre[t]
            else:
                out[t] += 2.0 * (pre[t] * cos(d * phi[t]) + pim[t] * sin(d * phi[t]))
    for t in range(cnt):
        out[t] /= M_PI


def wigner_laguerre(rho, xs, ps):
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    xs = np.asarray(xs, dtype=np.float64)
    ps = np.asarray(ps, dtype=np.float64)
    cdef Py_ssize_t dim = rho.shape[0], d, start, total
    sgn = np.where(np.arange(dim) % 2, -1.0, 1.0)
    cr_a = np.zeros((dim, dim))
    ci_a = np.zeros((dim, dim))
    act = np.zeros(dim, dtype=np.intc)
    for d in range(dim):
        diag = np.diagonal(rho, offset=-d) * sgn[: dim - d]
        cr_a[d, : dim - d] = diag.real
        ci_a[d, : dim - d] = diag.imag
        act[d] = bool(np.any(diag))
    nn = np.arange(dim, dtype=np.float64)[None, :]
    dd = np.arange(dim, dtype=np.float64)[:, None]
    up_a = np.sqrt(nn * (nn + dd))
    down_a = 1.0 / np.sqrt((nn + 1.0) * (nn + 1.0 + dd))
    lg_a = np.array([0.5 * lgamma(d + 1.0) for d in range(dim)])
    X, P = np.meshgrid(xs, ps, indexing="ij")
    z_a = np.ascontiguousarray((2.0 * (X * X + P * P)).ravel())
    phi_a = np.ascontiguousarray(np.arctan2(P, X).ravel())
    cdef const double[:, ::1] cr = cr_a, ci = ci_a, up = up_a, down = down_a
    cdef const double[::1] lg = lg_a, zv = z_a, phv = phi_a
    cdef const int[::1] active = act
    total = zv.shape[0]
    out = np.empty(total, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        start = 0
        while start < total:
            _tile(cr, ci, up, down, lg, active, dim, &zv[start], &phv[start],
                  min(<Py_ssize_t>TILE, total - start), &o[start])
            start += TILE
    return out.reshape(X.shape)
