"""Gaussian rules on [0, 1] and [0, ∞) used by every integral in the package.

Rules are cached by (parameters, node count); callers must not mutate the
returned arrays.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np
from scipy import special

DEFAULT_NODES = 64


def default_nodes() -> int:
    """Default node count, overridable through ``MEMFRAC_NODES``."""
    raw = os.environ.get("MEMFRAC_NODES")
    if raw:
        n = int(raw)
        if n < 2:
            raise ValueError("MEMFRAC_NODES must be at least 2")
        return n
    return DEFAULT_NODES


def _frozen(*arrays):
    for a in arrays:
        a.setflags(write=False)
    return arrays


@lru_cache(maxsize=512)
def gauss_jacobi01(p: float, q: float, n: int):
    """Nodes/weights for ∫₀¹ (1-u)^p u^q g(u) du, p, q > -1.

    Weights sum to B(q+1, p+1).
    """
    # scipy divides 0/0 in a branch it then discards when p + q = -1
    with np.errstate(invalid="ignore", divide="ignore"):
        x, w = special.roots_jacobi(n, p, q)
    u = 0.5 * (1.0 + x)
    w = w * 0.5 ** (p + q + 1.0)
    return _frozen(u, w)


@lru_cache(maxsize=64)
def gauss_legendre01(n: int):
    x, w = special.roots_legendre(n)
    return _frozen(0.5 * (1.0 + x), 0.5 * w)


@lru_cache(maxsize=128)
def gauss_laguerre(a: float, n: int):
    """Nodes/weights for ∫₀^∞ u^a e^{-u} g(u) du; weights sum to Γ(a+1)."""
    x, w = special.roots_genlaguerre(n, a)
    return _frozen(x, w)


def integrate01(g, p: float = 0.0, q: float = 0.0, n: int | None = None):
    """∫₀¹ (1-u)^p u^q g(u) du with a Gauss-Jacobi rule.

    ``g`` is called once with the node array and may return shape (n,) or
    (n, d).
    """
    n = n or default_nodes()
    if p == 0.0 and q == 0.0:
        u, w = gauss_legendre01(n)
    else:
        u, w = gauss_jacobi01(float(p), float(q), n)
    return np.tensordot(w, np.asarray(g(u)), axes=(0, 0))
