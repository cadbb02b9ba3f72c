import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm

from evenprec.protocol import ProtocolConfig
from evenprec.spin import (SpinValue, build_score_operator_qubit_ensemble, build_score_operator_spin,
                           cat_sign, closed_form_score, collective_spin_operators, dimension_witness,
                           jx_eigenbasis, jx_matrix, jz_diagonal, max_over_delta_spin,
                           max_quantum_score_spin, optimal_delta_scan, phase_average, spin_projector,
                           spin_vs_j, window_deltas)

SPINS = [SpinValue(t) for t in range(0, 13)]


def jy_matrix(j):
    m = j.m_values
    # J+ raises m: <m+1|J+|m> = sqrt(j(j+1) - m(m+1))
    jp = np.diag(np.sqrt(j.j * (j.j + 1) - m[:-1] * (m[:-1] + 1)), -1)
    return (jp - jp.T) / 2j


@pytest.mark.parametrize("text, two_j", [("2", 4), ("3/2", 3), (1.5, 3), (Fraction(5, 2), 5), (0, 0)])
def test_spin_value_parsing(text, two_j):
    sv = SpinValue.of(text)
    assert sv.two_j == two_j and sv.dim == two_j + 1


@pytest.mark.parametrize("bad", ["1/3", 0.25, -1])
def test_spin_value_rejects(bad):
    with pytest.raises(ValueError):
        SpinValue.of(bad)


@pytest.mark.parametrize("j", SPINS, ids=str)
def test_jx_basis_is_rotated_jz_basis(j):
    basis = jx_eigenbasis(j)
    U = basis.overlap
    assert np.allclose(U.T @ U, np.eye(j.dim), atol=1e-12)
    assert np.allclose(U.T @ jx_matrix(j) @ U, np.diag(basis.eigenvalues), atol=1e-12)
    # column mu equals exp(-i pi J_y / 2) |mu_z>
    R = expm(-1j * math.pi / 2 * jy_matrix(j)) if j.dim > 1 else np.ones((1, 1))
    assert np.max(np.abs(R.imag)) < 1e-12
    assert np.allclose(U, R.real, atol=1e-10)


@pytest.mark.parametrize("j", SPINS[1:], ids=str)
def test_jx_basis_top_row(j):
    U = jx_eigenbasis(j).overlap
    for i, mu in enumerate(j.m_values):
        k = int(round(j.j - mu))
        mag = 2.0 ** (-j.j) * math.sqrt(math.comb(j.two_j, k))
        assert U[-1, i] == pytest.approx((-1) ** k * mag, abs=1e-12)


@pytest.mark.parametrize("j", SPINS[1:], ids=str)
def test_jx_basis_symmetries(j):
    U = jx_eigenbasis(j).overlap
    m = j.m_values
    n = j.dim
    for a in range(n):
        for b in range(n):
            # <m'_z|m_x> = (-1)^(m-m') <m_z|m'_x>
            s = (-1) ** int(round(m[b] - m[a]))
            assert U[a, b] == pytest.approx(s * U[b, a], abs=1e-12)
            # <m'_z|m_x> = (-1)^(j-m) <(-m')_z|m_x>; for integer j this is (-1)^(j+m)
            s2 = (-1) ** int(round(j.j - m[b]))
            assert U[a, b] == pytest.approx(s2 * U[n - 1 - a, b], abs=1e-12)
            if j.is_integer:
                assert s2 == (-1) ** int(round(j.j + m[b]))


@pytest.mark.parametrize("j", SPINS, ids=str)
@pytest.mark.parametrize("delta", [0.0, 0.9, 1.0, 2.5, 7.0])
def test_projector_idempotent(j, delta):
    P = spin_projector(j, delta)
    assert np.allclose(P @ P, P, atol=1e-12)
    assert np.allclose(P, P.T)
    # rank counts the J_x eigenvalues inside the window
    rank = int(np.sum(np.abs(j.m_values) <= delta / 2 + 1e-9))
    assert round(np.trace(P)) == rank


@pytest.mark.parametrize("two_j", range(0, 9))
@pytest.mark.parametrize("K", [4, 6, 8])
@pytest.mark.parametrize("delta", [0.0, 1.0, 2.0, 3.3])
def test_operator_matches_brute_force_average(two_j, K, delta):
    j = SpinValue(two_j)
    cfg = ProtocolConfig(K, delta)
    brute = phase_average(spin_projector(j, delta), jz_diagonal(j), cfg)
    assert np.max(np.abs(brute.imag)) < 1e-12
    op = build_score_operator_spin(cfg, j)
    assert np.max(np.abs(brute.real - op.entries)) < 1e-12


@pytest.mark.parametrize("K", [4, 6, 8, 10])
def test_closed_form_at_threshold(K):
    for delta in np.arange(0, 2 * K + 1, 0.5):
        rep, _ = max_quantum_score_spin(ProtocolConfig(K, float(delta)), SpinValue(K))
        assert rep.value == pytest.approx(closed_form_score(K, float(delta)), abs=1e-12)


def test_cat_sign_alternates():
    assert [cat_sign(4, d) for d in (0, 1, 2, 3, 4)] == [1, 1, -1, -1, 1]


def test_dimension_witness():
    assert dimension_witness(4, 0.3) == 5
    assert dimension_witness(4, 0.25) is None
    with pytest.raises(ValueError):
        dimension_witness(5, 0.3)


@pytest.mark.parametrize("j", ["5/2", "3", "4", "9/2", "7"])
def test_window_deltas_cover_dense_grid(j):
    jv = SpinValue.of(j)
    best, _ = max_over_delta_spin(4, jv)
    basis = jx_eigenbasis(jv)
    dense = max(np.linalg.eigvalsh(build_score_operator_spin(ProtocolConfig(4, d), jv, basis).entries)[-1]
                for d in np.arange(0, 2 * jv.j + 2.1, 0.1))
    assert best == pytest.approx(dense, abs=1e-12)
    assert window_deltas(jv)[0] == 0.0


def test_optimal_scan_reports_peaks():
    scan = optimal_delta_scan(4, SpinValue.of(50), np.arange(0, 20.0001, 0.05))
    assert scan["argmax"] == pytest.approx(4.0)
    assert scan["max_score"] == pytest.approx(max_over_delta_spin(4, SpinValue.of(50))[0], abs=1e-12)
    assert scan["secondary_peak"]["delta"] == pytest.approx(12.0)
    assert scan["near_max"]


def test_spin_vs_j_rows():
    rows = spin_vs_j(4, 10, "opt")
    by_j = {r["j"]: r for r in rows}
    assert len(rows) == 21
    assert by_j["2"]["score"] == pytest.approx(0.375, abs=1e-12)
    assert by_j["2"]["gme_flag"]
    assert all(by_j[str(SpinValue(t))]["score"] == 0.0 for t in range(4))


@pytest.mark.parametrize("N", [4, 6])
def test_qubit_ensemble_matches_spin_block(N):
    cfg = ProtocolConfig(N, 1.0)
    S = build_score_operator_qubit_ensemble(N, cfg)
    assert np.linalg.eigvalsh(S)[-1] == pytest.approx(closed_form_score(N, 1.0), abs=1e-12)
    jx, jz = collective_spin_operators(N)
    assert np.allclose(jz[[0, -1]], [N / 2, -N / 2])
    assert np.allclose(jx, jx.T)


def test_qubit_ensemble_rejects_mismatched_k():
    with pytest.raises(ValueError):
        build_score_operator_qubit_ensemble(4, ProtocolConfig(6, 0.0))
