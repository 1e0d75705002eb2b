"""Hermite second-derivative reconstruction used by the residual checks."""

import numpy as np

from nsk.residuals import hermite_second_derivative, residual_sup


def test_exact_on_quintics():
    nodes = np.concatenate([np.linspace(1.0, 2.0, 11), np.geomspace(2.2, 6.0, 9)])
    c = np.array([0.3, -1.2, 0.7, 0.05, -0.02, 0.004])
    f = sum(ck * nodes**k for k, ck in enumerate(c))
    fp = sum(k * ck * nodes ** (k - 1) for k, ck in enumerate(c) if k > 0)
    fpp = sum(k * (k - 1) * ck * nodes ** (k - 2) for k, ck in enumerate(c) if k > 1)
    rec = hermite_second_derivative(nodes, f, fp)
    assert np.isnan(rec[0]) and np.isnan(rec[-1])
    assert np.max(np.abs(rec[1:-1] - fpp[1:-1])) <= 1e-10 * np.max(np.abs(fpp))


def test_fourth_order_on_smooth_function():
    def err(m):
        nodes = np.linspace(1.0, 3.0, m)
        f = np.sin(2.0 * nodes)
        fp = 2.0 * np.cos(2.0 * nodes)
        rec = hermite_second_derivative(nodes, f, fp)
        return np.nanmax(np.abs(rec + 4.0 * np.sin(2.0 * nodes)))

    e0, e1 = err(41), err(81)
    assert e0 / e1 >= 12.0


def test_residual_sup_ignores_boundary_nan():
    res = np.array([np.nan, 0.5, -2.0, np.nan])
    assert residual_sup(res) == 2.0
    assert residual_sup(np.array([np.nan, np.nan])) == 0.0
