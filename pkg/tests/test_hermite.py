import math

import numpy as np
import pytest
from scipy.special import eval_hermite, gammaln

from evenprec.hermite import hermite_functions, hermite_functions_scaled


def oracle(n, x):
    log_norm = -0.5 * (n * math.log(2.0) + gammaln(n + 1) + 0.5 * math.log(math.pi))
    return math.exp(log_norm) * eval_hermite(n, x) * math.exp(-x * x / 2)


@pytest.mark.parametrize("x", [0.0, 0.25, 1.0, -1.7, 3.0])
def test_low_orders_match_scipy(x):
    table = hermite_functions(30, np.array([x]))[:, 0]
    for n in range(31):
        assert table[n] == pytest.approx(oracle(n, x), abs=1e-13, rel=1e-11)


def test_orthonormal_by_quadrature():
    # Gauss-Hermite nodes integrate psi_n psi_m exactly once the weight is removed
    nodes, weights = np.polynomial.hermite.hermgauss(80)
    table = hermite_functions(40, nodes) * np.exp(nodes ** 2 / 2)
    gram = (table * weights) @ table.T
    assert np.allclose(gram, np.eye(41), atol=1e-11)


def test_parity():
    xs = np.linspace(0.1, 4.0, 9)
    a = hermite_functions(25, xs)
    b = hermite_functions(25, -xs)
    signs = (-1.0) ** np.arange(26)
    assert np.allclose(b, a * signs[:, None], atol=1e-15)


def test_high_order_scaled_no_overflow():
    mant, logs = hermite_functions_scaled(2000, 40.0)
    vals = np.log(np.abs(mant[mant != 0])) + logs[mant != 0]
    assert np.all(np.isfinite(vals))
    # far outside the classical turning point of low orders the value underflows in plain form
    assert vals[0] == pytest.approx(-800 - 0.25 * math.log(math.pi), abs=1e-9)
