"""Normalized Hermite functions by three-term recurrence.

``psi_n(x) = H_n(x) exp(-x**2/2) / sqrt(2**n n! sqrt(pi))`` are the number
states of the oscillator in the dimensionless position representation.
The recurrence

    psi_n = sqrt(2/n) x psi_{n-1} - sqrt((n-1)/n) psi_{n-2}

absorbs the factorials, so nothing overflows past n ~ 170. The Gaussian
factor is carried as a separate log scale, which keeps large |x| from
underflowing before the polynomial part has grown.
"""
import math

import numpy as np

_RESCALE = 1e150
_LOG_PI_4 = -0.25 * math.log(math.pi)


def hermite_functions_scaled(n_max: int, x: float):
    """Values ``psi_n(x)`` for ``n = 0..n_max`` as (mantissa, log-scale) pairs.

    ``psi_n(x) == mant[n] * exp(logscale[n])``; mantissas stay within
    ``1e-150..1e150`` so products of two functions can be formed in log form.
    """
    x = float(x)
    mant = np.empty(n_max + 1)
    logscale = np.empty(n_max + 1)
    scale = _LOG_PI_4 - 0.5 * x * x
    prev, cur = 0.0, 1.0
    mant[0], logscale[0] = cur, scale
    for n in range(1, n_max + 1):
        prev, cur = cur, math.sqrt(2.0 / n) * x * cur - math.sqrt((n - 1.0) / n) * prev
        if abs(cur) > _RESCALE:
            cur /= _RESCALE
            prev /= _RESCALE
            scale += math.log(_RESCALE)
        mant[n], logscale[n] = cur, scale
    return mant, logscale


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Table of ``psi_n(x)`` with shape ``(n_max + 1, len(x))``.

    Values below the double range come back as exact zeros.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty((n_max + 1, x.size))
    scale = _LOG_PI_4 - 0.5 * x * x
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    out[0] = np.exp(scale)
    log_r = math.log(_RESCALE)
    for n in range(1, n_max + 1):
        prev, cur = cur, math.sqrt(2.0 / n) * x * cur - math.sqrt((n - 1.0) / n) * prev
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur = np.where(big, cur / _RESCALE, cur)
            prev = np.where(big, prev / _RESCALE, prev)
            scale = np.where(big, scale + log_r, scale)
        with np.errstate(under="ignore"):
            out[n] = cur * np.exp(scale)
    return out
