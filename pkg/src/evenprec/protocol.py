"""Protocol configuration, angle grid and score bookkeeping shared by all models.

Units are dimensionless throughout (hbar = m = omega = 1). A round of the
even-parity protocol picks ``k`` uniformly from ``0..K-1``, measures the
precessing variable at angle ``pi*k/K`` and scores ``(-1)**k`` when the
outcome lies in the window ``|a| <= delta/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

#: slack used when flagging violations from exact (eigensolver/trace) scores
EXACT_SLACK = 1e-9
#: number of standard errors used when flagging violations from sampled scores
SAMPLED_SLACK_SIGMAS = 3.0


class NumericalError(RuntimeError):
    """An eigensolver or quadrature result failed its residual check."""


@dataclass(frozen=True)
class ProtocolConfig:
    """One protocol instance: ``K`` probing angles and window width ``delta``."""

    K: int
    delta: float

    def __post_init__(self):
        if isinstance(self.K, bool) or int(self.K) != self.K:
            raise ValueError(f"K must be an integer, got {self.K!r}")
        object.__setattr__(self, "K", int(self.K))
        if self.K < 4 or self.K % 2:
            raise ValueError(f"K must be even and >= 4, got {self.K}")
        delta = float(self.delta)
        if not math.isfinite(delta) or delta < 0:
            raise ValueError(f"delta must be finite and >= 0, got {self.delta!r}")
        object.__setattr__(self, "delta", delta)

    @property
    def half_width(self) -> float:
        return self.delta / 2.0

    @property
    def angles(self) -> np.ndarray:
        return angle_grid(self)

    @property
    def signs(self) -> np.ndarray:
        """The per-angle score weights ``(-1)**k``."""
        return np.where(np.arange(self.K) % 2 == 0, 1, -1)

    def with_delta(self, delta: float) -> "ProtocolConfig":
        return ProtocolConfig(self.K, delta)


@dataclass(frozen=True)
class ScoreValue:
    """An expected protocol score; always within ``[-1/2, 1/2]``."""

    value: float

    def __post_init__(self):
        value = float(self.value)
        if not abs(value) <= 0.5 + 1e-12:
            raise ValueError(f"score {value} outside [-1/2, 1/2]")
        object.__setattr__(self, "value", value)

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class ScoreReport:
    """A score compared against the classical bound ``1/K``.

    ``context`` carries provenance (system, truncation, spin, residual...)
    and the ``slack`` used to decide ``violation``.
    """

    config: ProtocolConfig
    score: ScoreValue
    classical_bound: float
    violation: bool
    context: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def build(cls, config: ProtocolConfig, value: float, slack: float = EXACT_SLACK,
              **context) -> "ScoreReport":
        bound = classical_bound(config)
        context = dict(context, slack=slack)
        return cls(config, ScoreValue(value), bound, bool(value > bound + slack), context)

    @property
    def value(self) -> float:
        return self.score.value


def classical_bound(config: ProtocolConfig) -> float:
    """Largest ``|score|`` reachable by any classical state: exactly ``1/K``."""
    return 1.0 / config.K


def angle_grid(config: ProtocolConfig) -> np.ndarray:
    """Probing angles ``pi*k/K`` for ``k = 0..K-1``."""
    return np.pi * np.arange(config.K) / config.K


def admissible_difference(diff, K: int):
    """True where an index difference is an odd multiple of ``K``.

    These are the only matrix positions where a score operator written in
    the eigenbasis of the precession generator can be nonzero.
    """
    diff = np.asarray(diff)
    return (diff % K == 0) & (diff % (2 * K) != 0)
