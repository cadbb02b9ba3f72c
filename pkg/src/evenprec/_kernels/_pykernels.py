"""Pure numpy implementations of the hot kernels.

Behaviour matches ``_ckernels.pyx`` to rounding; used when the compiled
module is unavailable or ``EVENPREC_PURE_PYTHON`` is set.
"""
import numpy as np


def classical_scores(a0, phi0, K, delta):
    """Score numerators in {-1, 0, 1} for classical pure states.

    The score of state ``i`` is ``out[i] / K``.
    """
    a0 = np.ascontiguousarray(a0, dtype=np.float64)
    phi0 = np.ascontiguousarray(phi0, dtype=np.float64)
    half = 0.5 * delta
    out = np.zeros(a0.shape, dtype=np.int64)
    for k in range(K):
        inside = np.abs(a0 * np.cos(np.pi * k / K + phi0)) <= half
        out += np.where(inside, 1 if k % 2 == 0 else -1, 0)
    return out


def _laguerre_diagonal(coeffs, d, z, phase_re, phase_im, acc):
    # accumulate Re[sum_n coeffs[n] (-1)^n g_n^(d)(z) e^{-i d phi}]
    # g_n^(d) = sqrt(n!/(n+d)!) z^(d/2) e^(-z/2) L_n^(d)(z), stable recurrence
    nmax = coeffs.shape[0]
    with np.errstate(divide="ignore"):
        logz = np.log(z)
    if d == 0:
        g_prev = np.exp(-0.5 * z)
    else:
        lg = 0.5 * d * logz - 0.5 * z - 0.5 * np.sum(np.log(np.arange(1, d + 1)))
        g_prev = np.where(z > 0, np.exp(lg), 0.0)
    total_re = np.zeros_like(z)
    total_im = np.zeros_like(z)
    c = coeffs[0]
    total_re += c.real * g_prev
    total_im += c.imag * g_prev
    if nmax > 1:
        g = (1.0 + d - z) * g_prev / np.sqrt(1.0 + d)
        for n in range(1, nmax):
            c = coeffs[n] * (-1.0 if n % 2 else 1.0)
            total_re += c.real * g
            total_im += c.imag * g
            if n + 1 < nmax:
                g_next = ((2 * n + 1 + d - z) * g - np.sqrt(n * (n + d)) * g_prev) / np.sqrt(
                    (n + 1.0) * (n + 1.0 + d)
                )
                g_prev, g = g, g_next
    # Re[(a + ib)(cos - i sin)] = a cos + b sin with phase e^{-i d phi}
    acc += total_re * phase_re + total_im * phase_im


def wigner_laguerre(rho, xs, ps):
    """Wigner function of a number-basis density matrix on an (x, p) grid.

    Returns an array of shape ``(len(xs), len(ps))``.
    """
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    xs = np.asarray(xs, dtype=np.float64)
    ps = np.asarray(ps, dtype=np.float64)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    z = 2.0 * (X * X + P * P)
    phi = np.arctan2(P, X)
    dim = rho.shape[0]
    acc = np.zeros_like(z)
    for d in range(dim):
        coeffs = np.diagonal(rho, offset=-d).copy()  # rho[n+d, n]
        if not np.any(coeffs):
            continue
        if d == 0:
            _laguerre_diagonal(coeffs, 0, z, np.ones_like(z), np.zeros_like(z), acc)
        else:
            part = np.zeros_like(z)
            _laguerre_diagonal(coeffs, d, z, np.cos(d * phi), np.sin(d * phi), part)
            acc += 2.0 * part
    return acc / np.pi
