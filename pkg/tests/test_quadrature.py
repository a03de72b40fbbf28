import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from memfrac.quadrature import default_nodes, gauss_jacobi01, gauss_laguerre, gauss_legendre01, integrate01
from memfrac.specfun import beta_fn


@given(st.floats(-0.9, 2.0), st.floats(-0.9, 2.0))
def test_jacobi_weights_sum_to_beta(p, q):
    u, w = gauss_jacobi01(p, q, 16)
    assert np.all(w > 0)
    assert np.all((u > 0) & (u < 1))
    assert w.sum() == pytest.approx(beta_fn(q + 1, p + 1), rel=1e-12)


@pytest.mark.parametrize("p,q", [(-0.5, 0.0), (-0.3, 0.3), (0.4, -0.7)])
def test_jacobi_exact_on_polynomials(p, q):
    u, w = gauss_jacobi01(p, q, 8)
    for k in range(16):
        assert np.dot(w, u**k) == pytest.approx(beta_fn(q + k + 1, p + 1), rel=1e-13)


@pytest.mark.parametrize("p,q", [(-0.5, 0.0), (-0.3, -0.2), (0.0, -0.6)])
def test_jacobi_matches_qaws(p, q):
    # independent oracle: QUADPACK algebraic-singularity rule
    g = np.cos
    ref, _ = integrate.quad(g, 0, 1, weight="alg", wvar=(q, p))
    assert integrate01(g, p, q, n=24) == pytest.approx(ref, rel=1e-12)


def test_legendre_exact():
    u, w = gauss_legendre01(10)
    for k in range(20):
        assert np.dot(w, u**k) == pytest.approx(1 / (k + 1), rel=1e-13)


def test_laguerre_weights_sum_to_gamma():
    x, w = gauss_laguerre(-0.5, 32)
    assert w.sum() == pytest.approx(math.gamma(0.5), rel=1e-12)


def test_rules_are_read_only():
    u, w = gauss_jacobi01(-0.5, 0.0, 8)
    with pytest.raises(ValueError):
        u[0] = 0.0


def test_node_override(monkeypatch):
    assert default_nodes() == 64
    monkeypatch.setenv("MEMFRAC_NODES", "96")
    assert default_nodes() == 96
    monkeypatch.setenv("MEMFRAC_NODES", "1")
    with pytest.raises(ValueError):
        default_nodes()
