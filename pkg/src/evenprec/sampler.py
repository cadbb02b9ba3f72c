"""Round-by-round simulation of the protocol.

Each round draws ``k`` uniformly, then whether the measured value lands
in the window. Quantum rounds draw that indicator from its exact
probability ``q_k``; the full outcome value is never sampled because the
score depends on the indicator only. The per-round contribution is
``(-1)^k`` if inside, else 0, and its mean over rounds estimates the
score directly.

Round ``r`` takes its uniforms from counter block ``r`` of the seed's
Philox stream (see :mod:`evenprec.rng`), so estimates are reproducible
however rounds are chunked.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import ClassicalEnsemble, ClassicalState
from .oscillator import FockState, position_window_matrix
from .protocol import ProtocolConfig
from .rng import uniform_block
from .spin import (QubitEnsembleState, SpinState, collective_spin_operators, jz_diagonal,
                   spin_projector, WINDOW_TOL)

PROB_TOL = 1e-10
CHUNK = 1 << 16


@dataclass(frozen=True)
class RoundRecord:
    k: int
    inside: bool
    contribution: int

    def __post_init__(self):
        want = (1 if self.k % 2 == 0 else -1) if self.inside else 0
        if self.contribution != want:
            raise ValueError("contribution must be (-1)^k when inside, else 0")


@dataclass(frozen=True)
class ScoreEstimate:
    mean: float
    stderr: float
    rounds: int
    seed: int

    def z(self, oracle: float) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == oracle else math.inf
        return (self.mean - oracle) / self.stderr


def window_probabilities(state, config: ProtocolConfig) -> np.ndarray:
    """Probability ``q_k`` of landing in the window at each angle (quantum states)."""
    K = config.K
    th = config.angles
    if isinstance(state, FockState):
        P = position_window_matrix(state.dim, config.delta)
        n = np.arange(state.dim)
        # phi_k = exp(-i th_k n) psi
        phis = np.exp(-1j * np.outer(th, n)) * state.amplitudes[None, :]
    elif isinstance(state, SpinState):
        P = spin_projector(state.j, config.delta)
        phis = np.exp(1j * np.outer(th, jz_diagonal(state.j))) * state.amplitudes[None, :]
    elif isinstance(state, QubitEnsembleState):
        jx, jz = collective_spin_operators(state.n_qubits)
        w, v = np.linalg.eigh(jx)
        sel = np.abs(w) <= config.half_width + WINDOW_TOL
        P = v[:, sel] @ v[:, sel].T
        phis = np.exp(1j * np.outer(th, jz)) * state.amplitudes[None, :]
    else:
        raise TypeError(f"unsupported state type {type(state).__name__}")
    q = np.einsum("ki,ij,kj->k", phis.conj(), P, phis).real
    if np.any(q < -PROB_TOL) or np.any(q > 1 + PROB_TOL):
        raise ArithmeticError(f"window probabilities out of range: {q}")
    assert q.shape == (K,)
    return np.clip(q, 0.0, 1.0)


def _classical_inside(states, config, k):
    a0 = np.array([s.A0 for s in states])
    phi0 = np.array([s.phi0 for s in states])
    return np.abs(a0 * np.cos(np.pi * k / config.K + phi0)) <= config.half_width


def _rounds_from_uniforms(state, config: ProtocolConfig, u: np.ndarray, q=None):
    K = config.K
    k = np.minimum((u[:, 0] * K).astype(np.int64), K - 1)
    if isinstance(state, ClassicalState):
        inside = _classical_inside([state], config, k)
    elif isinstance(state, ClassicalEnsemble):
        cum = np.cumsum(state.weights)
        comp = np.minimum(np.searchsorted(cum, u[:, 2] * cum[-1], side="right"), len(cum) - 1)
        st = state.states
        inside = np.abs(np.array([st[c].A0 for c in comp]) *
                        np.cos(np.pi * k / K + np.array([st[c].phi0 for c in comp]))) <= config.half_width
    else:
        q = window_probabilities(state, config) if q is None else q
        inside = u[:, 1] < q[k]
    contrib = np.where(inside, np.where(k % 2 == 0, 1, -1), 0)
    return k, inside, contrib


def sample_round_quantum(state, config: ProtocolConfig, k: int, rng: np.random.Generator) -> RoundRecord:
    """One round at a given angle index ``k``; classical states are deterministic."""
    if not 0 <= k < config.K:
        raise ValueError(f"k must be in [0, {config.K})")
    if isinstance(state, ClassicalState):
        inside = bool(abs(state.A0 * math.cos(math.pi * k / config.K + state.phi0)) <= config.half_width)
    else:
        q = window_probabilities(state, config)[k]
        inside = bool(rng.random() < q)
    return RoundRecord(k, inside, ((1 if k % 2 == 0 else -1) if inside else 0))


def simulate_rounds(state, config: ProtocolConfig, rounds: int, seed: int, chunk: int = CHUNK):
    """Arrays ``(k, inside, contribution)`` for rounds ``0..rounds-1``."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    q = None
    if not isinstance(state, (ClassicalState, ClassicalEnsemble)):
        q = window_probabilities(state, config)
    ks, ins, cs = [], [], []
    for start in range(0, rounds, chunk):
        count = min(chunk, rounds - start)
        k, inside, c = _rounds_from_uniforms(state, config, uniform_block(seed, start, count), q)
        ks.append(k)
        ins.append(inside)
        cs.append(c)
    return np.concatenate(ks), np.concatenate(ins), np.concatenate(cs)


def estimate_score(state, config: ProtocolConfig, rounds: int, seed: int = 0,
                   chunk: int = CHUNK) -> ScoreEstimate:
    _, _, c = simulate_rounds(state, config, rounds, seed, chunk)
    c = c.astype(np.float64)
    mean = float(np.sum(c) / rounds)  # numpy uses pairwise summation
    sd = float(np.std(c, ddof=1)) if rounds > 1 else 0.0
    return ScoreEstimate(mean, sd / math.sqrt(rounds), rounds, int(seed))


def exact_score(state, config: ProtocolConfig) -> float:
    """Trace oracle: the score averaged over ``k`` without sampling."""
    if isinstance(state, ClassicalState):
        from .classical import classical_score
        return classical_score(config, state).value
    if isinstance(state, ClassicalEnsemble):
        from .classical import ensemble_score
        return ensemble_score(config, state).value
    q = window_probabilities(state, config)
    return float(np.dot(config.signs, q) / config.K)
