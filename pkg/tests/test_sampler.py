import math
import warnings

import numpy as np
import pytest

from evenprec.classical import ClassicalState
from evenprec.oscillator import FockState, build_score_operator_cv, max_quantum_score_cv
from evenprec.protocol import ProtocolConfig
from evenprec.rng import item_generator, uniform_block
from evenprec.sampler import (RoundRecord, ScoreEstimate, estimate_score, exact_score, sample_round_quantum,
                              simulate_rounds, window_probabilities)
from evenprec.spin import (QubitEnsembleState, SpinState, SpinValue, build_score_operator_qubit_ensemble,
                           build_score_operator_spin)


def test_uniform_blocks_are_counter_based():
    full = uniform_block(7, 0, 50)
    assert np.array_equal(uniform_block(7, 20, 30), full[20:])
    assert not np.array_equal(uniform_block(8, 0, 50), full)
    assert full.min() >= 0 and full.max() < 1


def test_item_generator_reproducible():
    a = item_generator(3, 10).random(5)
    assert np.array_equal(a, item_generator(3, 10).random(5))
    assert not np.array_equal(a, item_generator(3, 11).random(5))


@pytest.mark.parametrize("chunk", [1, 7, 1000])
def test_chunking_does_not_change_rounds(chunk):
    state = SpinState.cat(4, 0.0)
    cfg = ProtocolConfig(4, 0.0)
    ref = simulate_rounds(state, cfg, 3000, seed=5)
    got = simulate_rounds(state, cfg, 3000, seed=5, chunk=chunk)
    for r, g in zip(ref, got):
        assert np.array_equal(r, g)


def test_round_record_validation():
    RoundRecord(2, True, 1)
    RoundRecord(3, False, 0)
    with pytest.raises(ValueError):
        RoundRecord(3, True, 1)


def test_window_probabilities_reproduce_operator_expectations():
    gen = np.random.default_rng(4)
    cfg = ProtocolConfig(4, 0.9)
    fock = FockState.normalized(gen.normal(size=24) + 1j * gen.normal(size=24))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        want = build_score_operator_cv(cfg, 24).expectation(fock)
    assert exact_score(fock, cfg) == pytest.approx(want, abs=1e-12)

    spin = SpinState(SpinValue.of("5/2"), (lambda v: v / np.linalg.norm(v))(gen.normal(size=6) + 1j * gen.normal(size=6)))
    want = build_score_operator_spin(cfg, spin.j).expectation(spin.amplitudes)
    assert exact_score(spin, cfg) == pytest.approx(want, abs=1e-12)

    a = gen.normal(size=16) + 1j * gen.normal(size=16)
    qubits = QubitEnsembleState(4, a / np.linalg.norm(a))
    S = build_score_operator_qubit_ensemble(4, cfg)
    assert exact_score(qubits, cfg) == pytest.approx(np.vdot(qubits.amplitudes, S @ qubits.amplitudes).real, abs=1e-12)


def test_window_probabilities_are_probabilities():
    _, state = max_quantum_score_cv(ProtocolConfig(6, 0.6), 128)
    q = window_probabilities(state, ProtocolConfig(6, 0.6))
    assert q.shape == (6,) and np.all((q >= 0) & (q <= 1))


def test_classical_rounds_deterministic():
    cfg = ProtocolConfig(4, 1.0)
    state = ClassicalState.from_xy(0.0, 10.0)
    gen = np.random.default_rng(0)
    assert sample_round_quantum(state, cfg, 0, gen) == RoundRecord(0, True, 1)
    assert sample_round_quantum(state, cfg, 1, gen) == RoundRecord(1, False, 0)
    with pytest.raises(ValueError):
        sample_round_quantum(state, cfg, 4, gen)


def test_estimate_matches_exact():
    cfg = ProtocolConfig(6, 0.0)
    state = SpinState.cat(6, 0.0)
    est = estimate_score(state, cfg, 20000, seed=99)
    assert abs(est.z(exact_score(state, cfg))) < 4
    assert est.rounds == 20000 and est.seed == 99


def test_score_estimate_z():
    assert ScoreEstimate(0.3, 0.01, 100, 0).z(0.28) == pytest.approx(2.0)
    assert ScoreEstimate(0.3, 0.0, 1, 0).z(0.3) == 0.0
    assert math.isinf(ScoreEstimate(0.3, 0.0, 1, 0).z(0.2))


def test_unsupported_state():
    with pytest.raises(TypeError):
        window_probabilities(object(), ProtocolConfig(4, 1.0))
