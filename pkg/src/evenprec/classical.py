"""Classical scores of the even-parity protocol.

A classical pure state precesses on a circle: ``A_x(theta) = A0 cos(theta + phi0)``.
Its score is ``(1/K) sum_k (-1)^k [|A_x(theta_k)| <= delta/2]``, which is
always one of ``0, +1/K, -1/K``; mixtures are convex combinations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .protocol import ProtocolConfig, ScoreValue, classical_bound
from .rng import uniform_block

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ClassicalState:
    """Orbit radius ``A0`` and initial phase ``phi0`` of a classical pure state."""

    A0: float
    phi0: float

    def __post_init__(self):
        a0 = float(self.A0)
        if not (math.isfinite(a0) and a0 >= 0):
            raise ValueError(f"A0 must be finite and >= 0, got {self.A0!r}")
        phi = float(self.phi0) % TWO_PI
        object.__setattr__(self, "A0", a0)
        object.__setattr__(self, "phi0", phi)

    @classmethod
    def from_xy(cls, ax: float, ay: float) -> "ClassicalState":
        """State with initial point ``(A_x(0), A_y(0)) = (ax, ay)``."""
        return cls(math.hypot(ax, ay), math.atan2(ay, ax))

    def ax(self, theta):
        return self.A0 * np.cos(np.asarray(theta) + self.phi0)

    def ay(self, theta):
        return self.A0 * np.sin(np.asarray(theta) + self.phi0)


@dataclass(frozen=True)
class ClassicalEnsemble:
    """Finite mixture of classical pure states; weights positive and summing to 1."""

    components: tuple[tuple[float, ClassicalState], ...]

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        if not comps:
            raise ValueError("an ensemble needs at least one component")
        if any(not w > 0 for w, _ in comps):
            raise ValueError("ensemble weights must be positive")
        total = math.fsum(w for w, _ in comps)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"ensemble weights sum to {total!r}, expected 1")
        object.__setattr__(self, "components", comps)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    @property
    def states(self) -> list[ClassicalState]:
        return [s for _, s in self.components]


def score_numerators(config: ProtocolConfig, a0, phi0) -> np.ndarray:
    """Integer score numerators (score times ``K``) for arrays of states."""
    return _kernels.classical_scores(np.asarray(a0, float), np.asarray(phi0, float),
                                     config.K, config.delta)


def classical_score(config: ProtocolConfig, state: ClassicalState) -> ScoreValue:
    num = int(score_numerators(config, [state.A0], [state.phi0])[0])
    return ScoreValue(num / config.K)


def ensemble_score(config: ProtocolConfig, ensemble: ClassicalEnsemble) -> ScoreValue:
    nums = score_numerators(config, [s.A0 for s in ensemble.states],
                            [s.phi0 for s in ensemble.states])
    return ScoreValue(math.fsum(w * n for w, n in zip(ensemble.weights, nums)) / config.K)


@dataclass(frozen=True)
class ScoreField:
    """Classical score as a function of the initial point, on a rectangular grid.

    ``values[i, j]`` is the score of the state starting at ``(xs[j], ys[i])``.
    """

    config: ProtocolConfig
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray

    def rows(self):
        """Row-major ``(ax, ay, score)`` records, x varying fastest."""
        for i, y in enumerate(self.ys):
            for j, x in enumerate(self.xs):
                yield dict(ax=float(x), ay=float(y), score=float(self.values[i, j]))


def classical_score_field(config: ProtocolConfig, x_range=(-3.0, 3.0), y_range=(-3.0, 3.0),
                          resolution=(201, 201)) -> ScoreField:
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    nx, ny = (int(r) for r in resolution)
    if nx < 2 or ny < 2:
        raise ValueError("resolution must be >= 2 along each axis")
    if not (x_range[1] > x_range[0] and y_range[1] > y_range[0]):
        raise ValueError("ranges must be nonempty")
    xs = np.linspace(x_range[0], x_range[1], nx)
    ys = np.linspace(y_range[0], y_range[1], ny)
    X, Y = np.meshgrid(xs, ys)
    nums = score_numerators(config, np.hypot(X, Y).ravel(), np.arctan2(Y, X).ravel())
    values = (nums / config.K).reshape(X.shape)
    return ScoreField(config, xs, ys, values)


def mc_sample_states(config: ProtocolConfig, n_samples: int, seed: int):
    """Random ``(A0, phi0)``: A0 log-uniform over ``[lo, 100 max(delta, 1)]``, phi0 uniform.

    ``lo = delta/100`` (or ``1e-2`` when ``delta == 0``). Sample ``i`` uses
    counter block ``i`` of the seed's stream.
    """
    lo = config.delta / 100.0 if config.delta > 0 else 1e-2
    hi = 100.0 * max(config.delta, 1.0)
    u = uniform_block(seed, 0, n_samples)
    a0 = np.exp(math.log(lo) + u[:, 0] * (math.log(hi) - math.log(lo)))
    phi0 = TWO_PI * u[:, 1]
    return a0, phi0, (lo, hi)


def mc_bound_check(config: ProtocolConfig, n_samples: int = 100_000, seed: int = 0) -> dict:
    """Score many random classical states and tally the values.

    Raises ``AssertionError`` if any state scores outside ``{0, +-1/K}``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    a0, phi0, (lo, hi) = mc_sample_states(config, n_samples, seed)
    nums = score_numerators(config, a0, phi0)
    bad = int(np.count_nonzero(np.abs(nums) > 1))
    if bad:
        raise AssertionError(f"{bad} states scored outside {{0, +-1/K}}")
    counts = {v: int(np.count_nonzero(nums == v)) for v in (-1, 0, 1)}
    return dict(
        K=config.K, delta=config.delta, n_samples=n_samples, seed=seed,
        distribution=f"A0 log-uniform on [{lo:g}, {hi:g}], phi0 uniform on [0, 2pi)",
        counts={"-1/K": counts[-1], "0": counts[0], "+1/K": counts[1]},
        max_abs_score=float(np.abs(nums).max()) / config.K,
        bound=classical_bound(config), exceeding_bound=0,
    )
