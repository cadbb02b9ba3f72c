"""Spin-j score operators, closed forms at j = K/2, and the GHZ/GME witness.

Matrices are written in the J_z basis with rows and columns ordered by
ascending ``m = -j, ..., j`` (index ``m + j``). J_x eigenvectors come from
the tridiagonal J_x matrix; column ``mu`` is ``exp(-i pi J_y / 2)|mu_z>``,
so ``<j,j_z|j,mu_x> = (-1)^(j-mu) 2^-j sqrt(binom(2j, j-mu))``.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .eigen import largest_eigenpair
from .protocol import EXACT_SLACK, ProtocolConfig, ScoreReport, admissible_difference, classical_bound

FLOOR_GUARD = 1e-12
WINDOW_TOL = 1e-9
MAX_QUBITS = 12


@dataclass(frozen=True, order=True)
class SpinValue:
    """Spin quantum number stored as ``two_j = 2j`` so half-integers stay exact."""

    two_j: int

    def __post_init__(self):
        if isinstance(self.two_j, bool) or int(self.two_j) != self.two_j or self.two_j < 0:
            raise ValueError(f"two_j must be a non-negative integer, got {self.two_j!r}")
        object.__setattr__(self, "two_j", int(self.two_j))

    @classmethod
    def of(cls, j) -> "SpinValue":
        """From ``2``, ``1.5``, ``"3/2"`` or an existing SpinValue."""
        if isinstance(j, SpinValue):
            return j
        twice = Fraction(j) * 2
        if twice.denominator != 1:
            raise ValueError(f"j must be an integer or half-integer, got {j!r}")
        return cls(int(twice))

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def dim(self) -> int:
        return self.two_j + 1

    @property
    def is_integer(self) -> bool:
        return self.two_j % 2 == 0

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(self.dim) - self.j

    def __str__(self):
        return str(self.two_j // 2) if self.is_integer else f"{self.two_j}/2"


@dataclass(frozen=True)
class JxBasis:
    """``overlap[m + j, mu + j] = <j, m_z | j, mu_x>``."""

    j: SpinValue
    eigenvalues: np.ndarray
    overlap: np.ndarray = field(repr=False)


def jz_diagonal(j: SpinValue) -> np.ndarray:
    return j.m_values


def jx_matrix(j: SpinValue) -> np.ndarray:
    m = j.m_values
    off = np.sqrt(j.j * (j.j + 1) - m[:-1] * (m[:-1] + 1)) / 2
    return np.diag(off, 1) + np.diag(off, -1)


def jx_eigenbasis(j) -> JxBasis:
    j = SpinValue.of(j)
    if j.dim == 1:
        return JxBasis(j, np.zeros(1), np.ones((1, 1)))
    m = j.m_values
    off = np.sqrt(j.j * (j.j + 1) - m[:-1] * (m[:-1] + 1)) / 2
    w, v = eigh_tridiagonal(np.zeros(j.dim), off)
    # the spectrum is simple: -j..j in unit steps
    if np.max(np.abs(w - m)) > 1e-8:
        raise ArithmeticError("J_x spectrum is not -j..j")
    top = v[-1]
    want = np.where((j.two_j - np.rint(2 * m).astype(int)) // 2 % 2 == 0, 1.0, -1.0)
    v = v * np.where(np.sign(top) == want, 1.0, -1.0)
    return JxBasis(j, m.copy(), v)


def window_two_m_max(j: SpinValue, delta: float) -> int:
    """``2 * m_max`` with ``m_max = floor(delta/2 + j) - j``; negative means empty."""
    return 2 * math.floor(delta / 2 + j.j + FLOOR_GUARD) - j.two_j


def spin_projector(j, delta: float, basis: JxBasis | None = None) -> np.ndarray:
    """Projector onto J_x eigenvalues ``|mu| <= delta/2`` in the J_z basis."""
    j = SpinValue.of(j)
    if delta < 0:
        raise ValueError("delta must be >= 0")
    basis = basis or jx_eigenbasis(j)
    m_max = window_two_m_max(j, delta) / 2
    sel = np.abs(basis.eigenvalues) <= m_max + WINDOW_TOL
    cols = basis.overlap[:, sel]
    return cols @ cols.T


@dataclass(frozen=True)
class ScoreOperatorSpin:
    config: ProtocolConfig
    j: SpinValue
    entries: np.ndarray = field(repr=False)

    def expectation(self, amplitudes) -> float:
        a = np.asarray(amplitudes, dtype=np.complex128)
        return float(np.vdot(a, self.entries @ a).real)


def _selection_mask(j: SpinValue, K: int) -> np.ndarray:
    idx = np.arange(j.dim)
    return admissible_difference(idx[:, None] - idx[None, :], K)


def build_score_operator_spin(config: ProtocolConfig, j, basis: JxBasis | None = None) -> ScoreOperatorSpin:
    """Score operator: the window projector restricted to odd multiples of ``K``."""
    j = SpinValue.of(j)
    entries = np.zeros((j.dim, j.dim))
    if j.two_j >= config.K:
        mask = _selection_mask(j, config.K)
        P = spin_projector(j, config.delta, basis)
        entries[mask] = P[mask]
        entries = 0.5 * (entries + entries.T)
    entries.setflags(write=False)
    return ScoreOperatorSpin(config, j, entries)


def phase_average(projector: np.ndarray, jz: np.ndarray, config: ProtocolConfig) -> np.ndarray:
    """Explicit K-term average ``(1/K) sum_k (-1)^k e^{-i th_k Jz} P e^{i th_k Jz}``.

    Independent of the selection rule; returns the complex result.
    """
    diff = jz[:, None] - jz[None, :]
    acc = np.zeros(projector.shape, dtype=np.complex128)
    for k, th in enumerate(config.angles):
        acc += (-1) ** k * np.exp(-1j * th * diff)
    return projector * acc / config.K


def max_quantum_score_spin(config: ProtocolConfig, j):
    j = SpinValue.of(j)
    op = build_score_operator_spin(config, j)
    lam, vec, residual = largest_eigenpair(op.entries)
    report = ScoreReport.build(config, lam, system="spin", j=str(j), dim=j.dim, residual=residual)
    return report, vec


def closed_form_score(K: int, delta: float) -> float:
    """Maximal score at ``j = K/2``: ``2^-(K-1) binom(K-1, floor((K+delta)/2))``."""
    b = math.floor((K + delta) / 2 + FLOOR_GUARD)
    if b > K - 1:
        return 0.0
    return math.comb(K - 1, b) / 2 ** (K - 1)


def cat_sign(K: int, delta: float) -> int:
    return -1 if math.floor((K + delta) / 2 + FLOOR_GUARD) % 2 else 1


def cat_state(K: int, delta: float) -> np.ndarray:
    """``(|j,-j_z> + (-1)^floor((delta+K)/2) |j,j_z>)/sqrt(2)`` for ``j = K/2``."""
    v = np.zeros(K + 1)
    v[0] = 1 / math.sqrt(2)
    v[-1] = cat_sign(K, delta) / math.sqrt(2)
    return v


def window_deltas(j) -> list[float]:
    """One representative ``delta`` per distinct window, smallest first.

    The score is piecewise constant in ``delta``, changing only when the
    window gains a pair of J_x eigenvalues, so these cover every value.
    """
    j = SpinValue.of(j)
    if j.is_integer:
        return [2.0 * w for w in range(j.two_j // 2 + 2)]
    return [0.0] + [float(2 * w + 1) for w in range((j.two_j + 1) // 2 + 1)]


def max_over_delta_spin(K: int, j) -> tuple[float, float]:
    """Exact ``max_delta`` of the maximal spin score; returns ``(score, delta)``."""
    j = SpinValue.of(j)
    if j.two_j < K:
        return 0.0, 0.0
    basis = jx_eigenbasis(j)
    best = (-np.inf, 0.0)
    for d in window_deltas(j):
        op = build_score_operator_spin(ProtocolConfig(K, d), j, basis)
        lam = float(np.linalg.eigvalsh(op.entries)[-1])
        if lam > best[0] + 1e-13:
            best = (lam, d)
    return best


def optimal_delta_scan(K: int, j, delta_grid, eps: float = 2.0 ** -8) -> dict:
    """Maximal spin score across ``delta_grid``.

    Returns rows, the grid argmax (first grid point attaining the max), the
    deltas within ``eps`` of the max, and the secondary local peak.
    """
    j = SpinValue.of(j)
    grid = [float(d) for d in delta_grid]
    if not grid:
        raise ValueError("delta grid is empty")
    basis = jx_eigenbasis(j) if j.two_j >= K else None
    cache: dict[int, float] = {}
    scores = []
    for d in grid:
        key = window_two_m_max(j, d)
        if key not in cache:
            if basis is None:
                cache[key] = 0.0
            else:
                op = build_score_operator_spin(ProtocolConfig(K, d), j, basis)
                cache[key] = float(np.linalg.eigvalsh(op.entries)[-1])
        scores.append(cache[key])
    scores = np.array(scores)
    best = float(scores.max())
    i_best = int(np.argmax(scores))
    near = [d for d, s in zip(grid, scores) if abs(s - best) <= eps]
    peaks = _plateau_peaks(grid, scores)
    secondary = peaks[1] if len(peaks) > 1 else None
    rows = [dict(j=str(j), delta=d, score=float(s), bound=1.0 / K) for d, s in zip(grid, scores)]
    return dict(rows=rows, argmax=grid[i_best], max_score=best, eps=eps, near_max=near,
                peaks=peaks, secondary_peak=secondary)


def _plateau_peaks(grid, scores):
    # collapse equal runs, then keep runs higher than both neighbours
    runs = []
    for d, s in zip(grid, scores):
        if runs and abs(runs[-1][2] - s) <= 1e-13:
            runs[-1][1] = d
        else:
            runs.append([d, d, float(s)])
    peaks = []
    for i, (lo, hi, s) in enumerate(runs):
        left = runs[i - 1][2] if i > 0 else -np.inf
        right = runs[i + 1][2] if i + 1 < len(runs) else -np.inf
        if s > left and s > right:
            peaks.append(dict(delta=lo, delta_end=hi, score=s))
    peaks.sort(key=lambda p: -p["score"])
    return peaks


def dimension_witness(K: int, observed_score: float) -> int | None:
    """Certified dimension floor ``K + 1`` when the score beats ``1/K``, else None."""
    if K < 4 or K % 2:
        raise ValueError("K must be even and >= 4")
    return K + 1 if observed_score > 1.0 / K else None


# -- qubit ensembles and GME -------------------------------------------------

def collective_spin_operators(N: int):
    """Total ``(J_x, J_z diagonal)`` for ``N`` qubits; basis bit 0 of a qubit is spin up."""
    sx = np.array([[0.0, 0.5], [0.5, 0.0]])
    eye = np.eye(2)
    dim = 2 ** N
    jx = np.zeros((dim, dim))
    for q in range(N):
        ops = [eye] * N
        ops[q] = sx
        term = ops[0]
        for o in ops[1:]:
            term = np.kron(term, o)
        jx += term
    bits = (np.arange(dim)[:, None] >> np.arange(N - 1, -1, -1)[None, :]) & 1
    jz = np.sum(0.5 - bits, axis=1)
    return jx, jz


def build_score_operator_qubit_ensemble(N: int, config: ProtocolConfig) -> np.ndarray:
    """Score operator of ``N`` qubits measured through their total spin (``K = N``).

    Built without the selection rule: the window projector of total J_x is
    averaged with explicit phases over the angle grid.
    """
    if N % 2 or N < 2:
        raise ValueError(f"N must be even, got {N}")
    if N != config.K:
        raise ValueError(f"qubit ensembles run the protocol with K = N; got N={N}, K={config.K}")
    if N > MAX_QUBITS:
        raise ValueError(f"N={N} exceeds {MAX_QUBITS} qubits; use the j = K/2 block directly")
    jx, jz = collective_spin_operators(N)
    w, v = np.linalg.eigh(jx)
    sel = np.abs(w) <= config.half_width + WINDOW_TOL
    P = v[:, sel] @ v[:, sel].T
    S = phase_average(P, jz, config)
    if np.max(np.abs(S.imag)) > 1e-12:
        raise ArithmeticError("phase average left an imaginary part")
    S = S.real
    S[np.abs(S) < 1e-13] = 0.0
    return 0.5 * (S + S.T)


def ghz_state(N: int, sign: int = 1) -> np.ndarray:
    """``(|up...up> + sign |down...down>)/sqrt(2)`` in the computational basis."""
    v = np.zeros(2 ** N)
    v[0] = 1 / math.sqrt(2)
    v[-1] = sign / math.sqrt(2)
    return v


def gme_separable_bound(config: ProtocolConfig) -> float:
    """Largest ``|score|`` of states that are not genuinely multipartite entangled."""
    return closed_form_score(config.K, config.delta) / 2.0


def depolarized_ghz_score(config: ProtocolConfig, p_noise: float) -> tuple[float, bool]:
    """Score of the GHZ state mixed with white noise; detected iff above the separable bound."""
    if not 0.0 <= p_noise <= 1.0:
        raise ValueError("p_noise must be in [0, 1]")
    score = (1.0 - p_noise) * closed_form_score(config.K, config.delta)
    return score, bool(score > gme_separable_bound(config))


def bipartitions(N: int):
    """All unordered splits of ``range(N)`` into two nonempty parts."""
    out = []
    for r in range(1, N // 2 + 1):
        for part in itertools.combinations(range(N), r):
            if r == N - r and 0 not in part:
                continue
            out.append((part, tuple(q for q in range(N) if q not in part)))
    return out


def product_state(N: int, part_a, psi_a, psi_b) -> np.ndarray:
    """Embed ``psi_a (x) psi_b`` on qubit subsets ``part_a`` and its complement."""
    part_b = [q for q in range(N) if q not in part_a]
    t = np.kron(psi_a, psi_b).reshape([2] * N)
    order = list(part_a) + part_b
    return np.transpose(t, np.argsort(order)).reshape(-1)


def spin_cv_convergence_report(K: int, j_list, dim: int = 512, cv_delta_grid=None,
                               include_curves: bool = True, curve_max: float = 3.0) -> dict:
    """Compare ``max_delta`` spin scores with the truncated oscillator maximum.

    Summary rows: ``j, delta, score, cv_max, difference``. Curve rows put
    spin scores on the rescaled ``delta/sqrt(j)`` axis next to the
    oscillator score there. Nothing is asserted.
    """
    from .oscillator import max_quantum_score_cv

    grid = np.arange(0.02, 3.0 + 1e-12, 0.02) if cv_delta_grid is None else np.asarray(cv_delta_grid)
    cv_scores = [max_quantum_score_cv(ProtocolConfig(K, d), dim)[0].value for d in grid]
    i = int(np.argmax(cv_scores))
    cv_max, cv_arg = float(cv_scores[i]), float(grid[i])
    cv_cache: dict[float, float] = {}

    def cv_at(d):
        if d not in cv_cache:
            cv_cache[d] = max_quantum_score_cv(ProtocolConfig(K, d), dim)[0].value if d > 0 else 0.0
        return cv_cache[d]

    summary, curves = [], []
    for jv in sorted(SpinValue.of(x) for x in j_list):
        score, d_best = max_over_delta_spin(K, jv)
        summary.append(dict(j=str(jv), delta=d_best, score=score, cv_max=cv_max,
                            cv_argmax=cv_arg, difference=abs(score - cv_max),
                            bound=1.0 / K, violation=bool(score > 1.0 / K + EXACT_SLACK)))
        if include_curves and jv.two_j > 0:
            root = math.sqrt(jv.j)
            basis = jx_eigenbasis(jv) if jv.two_j >= K else None
            for d in window_deltas(jv):
                if d / root > curve_max:
                    break
                s = 0.0
                if basis is not None:
                    op = build_score_operator_spin(ProtocolConfig(K, d), jv, basis)
                    s = float(np.linalg.eigvalsh(op.entries)[-1])
                curves.append(dict(j=str(jv), delta=d, score=s, delta_over_sqrt_j=d / root,
                                   cv_score=cv_at(round(d / root, 12))))
    return dict(K=K, dim=dim, cv_max=cv_max, cv_argmax=cv_arg, summary=summary, curves=curves)


@dataclass(frozen=True)
class SpinState:
    """Pure spin-j state; amplitudes ordered by ascending ``m``."""

    j: SpinValue
    amplitudes: np.ndarray

    def __post_init__(self):
        j = SpinValue.of(self.j)
        a = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if a.size != j.dim:
            raise ValueError(f"expected {j.dim} amplitudes for j={j}, got {a.size}")
        if abs(np.vdot(a, a).real - 1) > 1e-10:
            raise ValueError("spin state is not normalized")
        a.setflags(write=False)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def cat(cls, K: int, delta: float) -> "SpinState":
        return cls(SpinValue(K), cat_state(K, delta))


@dataclass(frozen=True)
class QubitEnsembleState:
    """Pure state of ``n_qubits`` qubits in the computational basis."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128).ravel()
        if a.size != 2 ** self.n_qubits:
            raise ValueError("amplitude count does not match the number of qubits")
        if abs(np.vdot(a, a).real - 1) > 1e-10:
            raise ValueError("qubit state is not normalized")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def ghz(cls, N: int, sign: int = 1) -> "QubitEnsembleState":
        return cls(N, ghz_state(N, sign))


def spin_vs_j(K: int, j_max, delta="opt") -> list[dict]:
    """Maximal score for every ``j = 0, 1/2, ..., j_max`` at fixed or optimal delta."""
    top = SpinValue.of(j_max)
    rows = []
    for tj in range(top.two_j + 1):
        jv = SpinValue(tj)
        if delta == "opt":
            score, d = max_over_delta_spin(K, jv)
        else:
            d = float(delta)
            score = float(np.linalg.eigvalsh(build_score_operator_spin(ProtocolConfig(K, d), jv).entries)[-1])
        cfg = ProtocolConfig(K, d)
        sep = gme_separable_bound(cfg) if tj == K else float("nan")
        rows.append(dict(j=str(jv), delta=d, score=score, bound=classical_bound(cfg), sep_bound=sep,
                         violation=bool(score > classical_bound(cfg) + EXACT_SLACK),
                         gme_flag=bool(tj == K and score > sep)))
    return rows
