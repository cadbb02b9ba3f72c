"""Harmonic-oscillator score operator in the truncated number basis.

The measured variable is the dimensionless quadrature at angle ``theta``.
Its window projector ``P = int_{-delta/2}^{delta/2} |x><x| dx`` averaged
with the ``(-1)**k`` phases over the angle grid only survives on matrix
positions whose index difference is an odd multiple of ``K``; there it
equals the position-window matrix element, which has a closed Wronskian
form.

Also here: Wigner functions and negativity volume, the negativity
inequality, the Gaussian lower-bound family, and the center-of-mass
entanglement witness on a supplied reduced state.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from . import _kernels
from .eigen import largest_eigenpair
from .hermite import hermite_functions, hermite_functions_scaled
from .protocol import EXACT_SLACK, ProtocolConfig, ScoreReport, admissible_difference, classical_bound

DEFAULT_DIM = 512
NORM_TOL = 1e-10
WIGNER_NORM_TOL = 1e-6
NEGATIVITY_SLACK = 1e-3


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("EVENPREC_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class FockState:
    """A pure state in the number basis ``|0>..|dim-1>``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if amps.size < 1:
            raise ValueError("a Fock state needs at least one amplitude")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm2!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, amplitudes) -> "FockState":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        return cls(amps / np.linalg.norm(amps))

    @classmethod
    def number(cls, n: int, dim: int) -> "FockState":
        amps = np.zeros(dim, dtype=np.complex128)
        amps[n] = 1.0
        return cls(amps)

    @classmethod
    def vacuum(cls, dim: int = 1) -> "FockState":
        return cls.number(0, dim)

    @classmethod
    def coherent(cls, alpha: complex, dim: int) -> "FockState":
        n = np.arange(dim)
        log_fact = np.array([math.lgamma(k + 1.0) for k in n])
        mag = np.exp(-0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha) or 1.0) - 0.5 * log_fact)
        if alpha == 0:
            mag = (n == 0).astype(float)
        amps = mag * np.exp(1j * n * np.angle(alpha))
        return cls.normalized(amps)

    def padded(self, dim: int) -> "FockState":
        if dim < self.dim:
            raise ValueError("cannot pad to a smaller dimension")
        amps = np.zeros(dim, dtype=np.complex128)
        amps[: self.dim] = self.amplitudes
        return FockState(amps)

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


# -- matrix elements ---------------------------------------------------------

def projector_element(n: int, n_prime: int, delta: float) -> float:
    """Off-diagonal number-basis element of the position window ``|x| <= delta/2``.

    Wronskian closed form, with both Hermite functions normalized::

        sqrt(2) [sqrt(n') psi_n psi_{n'-1} - sqrt(n) psi_{n'} psi_{n-1}] / (n - n')

    evaluated at ``delta/2``. Products are formed in log-magnitude and
    sign, so large ``n + n'`` neither overflows nor underflows early.
    Odd differences vanish by parity.
    """
    n, n_prime = int(n), int(n_prime)
    if n < 0 or n_prime < 0:
        raise ValueError("indices must be non-negative")
    if n == n_prime:
        raise ValueError("diagonal elements are not defined by the Wronskian form")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if (n - n_prime) % 2 or delta == 0:
        return 0.0
    mant, logs = hermite_functions_scaled(max(n, n_prime), 0.5 * delta)
    return _wronskian(n, n_prime, mant, logs)


def _log_product(mant, logs, a, b):
    # psi_a * psi_b as sign * exp(log magnitude); zero mantissa -> 0
    pa, pb = mant[a], mant[b]
    if pa == 0.0 or pb == 0.0:
        return 0.0
    return math.copysign(1.0, pa * pb) * math.exp(
        math.log(abs(pa)) + math.log(abs(pb)) + logs[a] + logs[b]
    )


def _wronskian(n, m, mant, logs):
    t1 = math.sqrt(m) * _log_product(mant, logs, n, m - 1) if m > 0 else 0.0
    t2 = math.sqrt(n) * _log_product(mant, logs, m, n - 1) if n > 0 else 0.0
    return math.sqrt(2.0) * (t1 - t2) / (n - m)


def position_window_matrix(dim: int, delta: float) -> np.ndarray:
    """Full truncated matrix of the window projector, diagonal included.

    Gauss-Legendre quadrature of ``psi_n psi_m`` over ``[-delta/2, delta/2]``;
    the integrand is entire, so ``dim + 64`` nodes reach machine precision.
    Used by the round sampler, which needs every element.
    """
    if delta == 0:
        return np.zeros((dim, dim))
    nodes, weights = np.polynomial.legendre.leggauss(dim + 64)
    a = 0.5 * delta
    psi = hermite_functions(dim - 1, a * nodes)
    return (psi * (a * weights)) @ psi.T


# -- score operator ----------------------------------------------------------

@dataclass(frozen=True)
class ScoreOperatorCV:
    """Real symmetric score operator of the oscillator, truncated to ``dim`` levels."""

    config: ProtocolConfig
    dim: int
    entries: np.ndarray = field(repr=False)

    @property
    def is_zero(self) -> bool:
        """True when no admissible index difference fits (``dim < K + 1``)."""
        return self.dim < self.config.K + 1

    def expectation(self, state) -> float:
        """``<psi|S|psi>`` for a FockState or ``tr(rho S)`` for a density matrix."""
        if isinstance(state, FockState):
            amps = _fit(state.amplitudes, self.dim)
            return float(np.vdot(amps, self.entries @ amps).real)
        rho = np.asarray(state)
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"density matrix shape {rho.shape} does not match dim {self.dim}")
        return float(np.sum(self.entries * rho.T).real)


def _fit(amps, dim):
    if amps.size > dim:
        if np.any(amps[dim:]):
            raise ValueError(f"state has support beyond the operator truncation {dim}")
        return amps[:dim]
    out = np.zeros(dim, dtype=amps.dtype)
    out[: amps.size] = amps
    return out


def build_score_operator_cv(config: ProtocolConfig, dim: int) -> ScoreOperatorCV:
    """Score operator on the first ``dim`` number states.

    Only positions with ``n - n'`` an odd multiple of ``K`` are filled.
    When ``dim < K + 1`` the result is the zero matrix and a warning is issued.
    """
    dim = int(dim)
    if dim < 1:
        raise ValueError("dim must be >= 1")
    K = config.K
    entries = np.zeros((dim, dim))
    if dim < K + 1:
        warnings.warn(f"dim={dim} < K+1={K + 1}: the truncated score operator is zero",
                      RuntimeWarning, stacklevel=2)
    elif config.delta > 0:
        mant, logs = hermite_functions_scaled(dim - 1, config.half_width)
        sign = np.sign(mant)
        with np.errstate(divide="ignore"):
            logmag = np.log(np.abs(mant)) + logs
        for d in range(K, dim, 2 * K):
            m = np.arange(0, dim - d)
            n = m + d
            t1 = np.zeros(m.size)
            pos = m > 0
            mp = m[pos]
            t1[pos] = np.sqrt(mp) * sign[n[pos]] * sign[mp - 1] * np.exp(logmag[n[pos]] + logmag[mp - 1])
            t2 = np.sqrt(n) * sign[m] * sign[n - 1] * np.exp(logmag[m] + logmag[n - 1])
            vals = math.sqrt(2.0) * (t1 - t2) / d
            vals = np.nan_to_num(vals, nan=0.0)
            entries[n, m] = vals
            entries[m, n] = vals
    entries.setflags(write=False)
    return ScoreOperatorCV(config, dim, entries)


def max_quantum_score_cv(config: ProtocolConfig, dim: int = DEFAULT_DIM,
                         convergence_check: bool = False):
    """Largest eigenvalue of the truncated score operator and its eigenvector.

    With ``convergence_check`` the eigenvalue is recomputed at ``2*dim`` and
    the shift is stored in the report context.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        op = build_score_operator_cv(config, dim)
    lam, vec, residual = largest_eigenpair(op.entries)
    context = dict(system="oscillator", dim=dim, residual=residual)
    if convergence_check:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            lam2, _, _ = largest_eigenpair(build_score_operator_cv(config, 2 * dim).entries)
        context["truncation_shift"] = lam2 - lam
    return ScoreReport.build(config, lam, **context), FockState(vec.astype(np.complex128))


def delta_scan_cv(K: int, delta_grid, dim: int = DEFAULT_DIM, threads: int | None = None,
                  convergence_check: bool = False) -> list[dict]:
    """Maximal score for each ``delta`` in the grid, in grid order.

    Rows carry ``delta, score, bound, violation, dim, residual`` and, with
    ``convergence_check``, ``truncation_shift``.
    """
    grid = [float(d) for d in delta_grid]
    if not grid:
        raise ValueError("delta grid is empty")
    configs = [ProtocolConfig(K, d) for d in grid]
    threads = default_threads() if threads is None else threads

    def one(cfg):
        report, _ = max_quantum_score_cv(cfg, dim, convergence_check)
        row = dict(delta=cfg.delta, score=report.value, bound=report.classical_bound,
                   violation=report.violation, dim=dim, residual=report.context["residual"])
        if convergence_check:
            row["truncation_shift"] = report.context["truncation_shift"]
        return row

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(one, configs))
    return [one(c) for c in configs]


# -- Wigner function ---------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Uniform phase-space grid; defaults cover ``[-8, 8]^2`` with 801 points per axis."""

    x_min: float = -8.0
    x_max: float = 8.0
    nx: int = 801
    p_min: float = -8.0
    p_max: float = 8.0
    np_: int = 801

    def __post_init__(self):
        if self.nx < 2 or self.np_ < 2:
            raise ValueError("grids need at least two points per axis")
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("grid ranges must be nonempty")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.np_)


@dataclass(frozen=True)
class WignerGrid:
    xs: np.ndarray
    ps: np.ndarray
    values: np.ndarray = field(repr=False)  # values[i, j] = W(xs[i], ps[j])

    @property
    def cell(self) -> float:
        return float((self.xs[1] - self.xs[0]) * (self.ps[1] - self.ps[0]))

    @property
    def total(self) -> float:
        """Midpoint-rule integral of W over the grid (1 for a state that fits)."""
        return float(self.values.sum() * self.cell)

    def rows(self):
        for i, x in enumerate(self.xs):
            for j, p in enumerate(self.ps):
                yield dict(x=float(x), p=float(p), w=float(self.values[i, j]))


def wigner_function(state, grid: GridSpec | None = None, norm_tol: float = WIGNER_NORM_TOL) -> WignerGrid:
    """Wigner function on a uniform grid.

    Pure states (:class:`FockState`) go through the Moyal integral
    ``W(x,p) = (1/pi) int psi*(x+y) psi(x-y) exp(2ipy) dy`` with the
    wavefunction sampled finely enough for the trapezoid rule to be
    spectrally accurate. Density matrices use the Laguerre kernel of the
    compiled core. A normalization deficit above ``norm_tol`` means the
    state does not fit the grid and is reported with a warning.
    """
    grid = grid or GridSpec()
    if isinstance(state, FockState):
        values = _wigner_moyal(state.amplitudes, grid)
    else:
        rho = np.asarray(state, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("expected a FockState or a square density matrix")
        values = _kernels.wigner_laguerre(rho, grid.xs, grid.ps)
    out = WignerGrid(grid.xs, grid.ps, values)
    deficit = abs(out.total - 1.0)
    if deficit > norm_tol:
        warnings.warn(f"Wigner normalization off by {deficit:.2e}; the state may not fit the grid",
                      RuntimeWarning, stacklevel=2)
    return out


def _wigner_moyal(amps, grid: GridSpec) -> np.ndarray:
    amps = np.asarray(amps, dtype=np.complex128)
    nz = np.nonzero(np.abs(amps) > 1e-15 * np.abs(amps).max())[0]
    n_max = int(nz[-1])
    amps = amps[: n_max + 1]
    k_max = math.sqrt(2 * n_max + 1)
    xs, ps = grid.xs, grid.ps
    dx = xs[1] - xs[0]
    p_abs = max(abs(grid.p_min), abs(grid.p_max))
    # integrand bandwidth in y is at most 2 k_max + 2 |p|
    h_max = math.pi / (2.0 * k_max + 2.0 * p_abs + 4.0)
    sub = max(1, math.ceil(dx / h_max))
    h = dx / sub
    # the wavefunction is negligible beyond the turning point plus a margin
    radius = k_max + 10.0
    ny = int(math.ceil(radius / h))
    u_lo = -ny
    u_hi = (grid.nx - 1) * sub + ny
    u = grid.x_min + h * np.arange(u_lo, u_hi + 1)
    psi_u = amps @ hermite_functions(n_max, u).astype(np.complex128)
    # f[i, k] = conj(psi(x_i + y_k)) psi(x_i - y_k), y_k = k h
    base = np.arange(grid.nx) * sub - u_lo
    k = np.arange(ny + 1)
    f = psi_u[base[:, None] + k[None, :]].conj() * psi_u[base[:, None] - k[None, :]]
    w = np.full(ny + 1, 2.0)
    w[0] = 1.0
    y = h * k
    phase = 2.0 * np.outer(y, ps)
    out = (f.real * w) @ np.cos(phase)
    if np.any(f.imag):
        out -= (f.imag * w) @ np.sin(phase)
    return out * (h / math.pi)


def negativity_volume(grid: WignerGrid) -> float:
    """Integral of the negative part of W over the grid (midpoint rule)."""
    v = grid.values
    return float(np.sum((np.abs(v) - v) * 0.5) * grid.cell)


def negativity_bound_check(config: ProtocolConfig, state: FockState, dim: int | None = None,
                           grid: GridSpec | None = None, slack: float = NEGATIVITY_SLACK) -> dict:
    """Compare ``K (|s| - 1/K)`` with twice the Wigner negativity volume of ``state``.

    ``holds`` is ``lhs <= rhs + slack``; ``margin`` is ``rhs + slack - lhs``.
    """
    dim = state.dim if dim is None else dim
    op = build_score_operator_cv(config, dim)
    s = op.expectation(state)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        wg = wigner_function(state, grid)
    nv = negativity_volume(wg)
    lhs = config.K * (abs(s) - classical_bound(config))
    rhs = 2.0 * nv
    return dict(score=s, negativity_volume=nv, lhs=lhs, rhs=rhs, slack=slack,
                holds=bool(lhs <= rhs + slack), margin=rhs + slack - lhs,
                wigner_total=wg.total)


# -- Gaussian family and witness ---------------------------------------------

def gaussian_lower_bound(config: ProtocolConfig, sigma: float) -> float:
    """Score lower bound attained by the squeezed Gaussian family of width ``sigma``.

    ``(1/K) [erf(sigma delta/2) (1 + erf(sigma delta/2)) - 1]``; increases
    with ``sigma`` towards ``1/K``.
    """
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    e = float(erf(sigma * config.half_width))
    return (e * (1.0 + e) - 1.0) / config.K


def gaussian_family_peak_momentum(config: ProtocolConfig, sigma: float) -> float:
    """Mean momentum ``p0 + delta sigma^2 / 2`` of the family, ``p0 = delta / (2 sin(pi/K))``."""
    p0 = config.delta / (2.0 * math.sin(math.pi / config.K))
    return p0 + config.delta * sigma ** 2 / 2.0


def com_witness(rho, config: ProtocolConfig, dim: int | None = None,
                slack: float = EXACT_SLACK) -> dict:
    """Entanglement test on the reduced center-of-mass state of two oscillators.

    A score above ``1/K`` certifies that the two-oscillator state is
    entangled (and non-Gaussian); the implied negativity floor is
    ``K (score - 1/K) / 2``.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("reduced state must be a square matrix")
    if not np.allclose(rho, rho.conj().T, atol=1e-12):
        raise ValueError("reduced state is not Hermitian")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > 1e-10:
        raise ValueError(f"reduced state has trace {tr!r}, expected 1")
    lo = float(np.linalg.eigvalsh(rho).min())
    if lo < -1e-10:
        raise ValueError(f"reduced state is not positive semidefinite (eigenvalue {lo:.3e})")
    dim = rho.shape[0] if dim is None else dim
    if dim != rho.shape[0]:
        padded = np.zeros((dim, dim), dtype=np.complex128)
        n = min(dim, rho.shape[0])
        if rho.shape[0] > dim and np.any(np.abs(rho[dim:, :]) > 0):
            raise ValueError("reduced state has support beyond the truncation")
        padded[:n, :n] = rho[:n, :n]
        rho = padded
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        op = build_score_operator_cv(config, dim)
    score = op.expectation(rho)
    bound = classical_bound(config)
    entangled = bool(score > bound + slack)
    floor = config.K * (score - bound) / 2.0
    return dict(score=score, bound=bound, entangled=entangled,
                negativity_floor=floor if floor > 0 else 0.0, dim=dim)
