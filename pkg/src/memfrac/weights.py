"""Weight distributions W on [0, 1] for the memory operator D x(t) = E[x'(tW)].

Every family here is supported on [0, 1] with essential supremum 1.  A
weight is *admissible* when additionally n E[W^n] → ∞; only admissible
weights define a memory operator with an entire exponential-type function.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AxiomError, NoKnownPairing, ParseError
from .quadrature import default_nodes, gauss_jacobi01, gauss_laguerre, gauss_legendre01
from .specfun import log_beta

KINDS = ("dirac", "beta", "expgamma", "bemix", "uniform")

MEMORY_CONDITION = "lim n*E[W^n] = infinity"


@dataclass(frozen=True)
class WeightDistribution:
    """Law of the delay factor W.

    kind
        ``dirac`` (W = 1), ``beta`` (Beta(a, b)), ``expgamma`` (W = e^{-G},
        G ~ Gamma(a, 1)), ``bemix`` (-log W ~ Bernoulli(1/2)·Exp(1), i.e. an
        equal mixture of the atom at 1 and Uniform(0, 1)) or ``uniform``.
    """

    kind: str
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "beta":
            if self.a is None or self.b is None or not (self.a > 0 and self.b > 0):
                raise ValueError("beta weight needs a > 0 and b > 0")
        elif self.kind == "expgamma":
            if self.a is None or not self.a > 0:
                raise ValueError("expgamma weight needs a shape a > 0")
        elif self.a is not None or self.b is not None:
            raise ValueError(f"{self.kind} weight takes no parameters")

    @classmethod
    def dirac(cls):
        return cls("dirac")

    @classmethod
    def beta(cls, a, b):
        return cls("beta", float(a), float(b))

    @classmethod
    def expgamma(cls, a):
        return cls("expgamma", float(a))

    @classmethod
    def bemix(cls):
        return cls("bemix")

    @classmethod
    def uniform(cls):
        return cls("uniform")

    @classmethod
    def lfrac(cls, alpha):
        """W ~ Beta(1, 1-α): the weight of the L-fractional derivative."""
        return cls.beta(1.0, 1.0 - alpha)

    def moment(self, n: int) -> float:
        return moment(self, n)

    def __str__(self):
        if self.kind == "beta":
            return f"beta:{self.a:g},{self.b:g}"
        if self.kind == "expgamma":
            return f"expgamma:{self.a:g}"
        return self.kind


def moment(w: WeightDistribution, n: int) -> float:
    """Closed-form E[W^n]."""
    if n < 0:
        raise ValueError("moment order must be non-negative")
    if n == 0:
        return 1.0
    if w.kind == "dirac":
        return 1.0
    if w.kind == "beta":
        return math.exp(log_beta(w.a + n, w.b) - log_beta(w.a, w.b))
    if w.kind == "expgamma":
        return (1.0 + n) ** (-w.a)
    if w.kind == "bemix":
        return (2.0 + n) / (2.0 + 2.0 * n)
    return 1.0 / (1.0 + n)


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    limit: float
    condition: str = MEMORY_CONDITION

    def __bool__(self):
        return self.ok


def admissible(w: WeightDistribution) -> Admissibility:
    """Decide n E[W^n] → ∞ from each family's asymptotics.

    ``limit`` is ``inf`` for admissible weights and the finite limit of
    n E[W^n] otherwise.
    """
    if w.kind in ("dirac", "bemix"):
        return Admissibility(True, math.inf)
    if w.kind == "uniform":
        return Admissibility(False, 1.0)
    if w.kind == "beta":
        # n E[W^n] ~ n^{1-b} Γ(a+b)/Γ(a)
        if w.b < 1:
            return Admissibility(True, math.inf)
        return Admissibility(False, w.a if w.b == 1 else 0.0)
    # expgamma: n (1+n)^{-a}
    if w.a < 1:
        return Admissibility(True, math.inf)
    return Admissibility(False, 1.0 if w.a == 1 else 0.0)


def require_admissible(w: WeightDistribution) -> None:
    verdict = admissible(w)
    if not verdict:
        raise AxiomError(
            f"weight {w} is not admissible: the memory condition {MEMORY_CONDITION} "
            f"fails (n*E[W^n] -> {verdict.limit:g})",
            condition=MEMORY_CONDITION,
        )


# ---------------------------------------------------------------------------
# paired variable V with W·V ~ Uniform(0, 1)


@dataclass(frozen=True)
class PairedWeight:
    """A weight W with an independent V such that WV is Uniform(0, 1).

    ``v`` is the law of V expressed as a weight distribution; ``v_kind``
    names the pairing (``uniform``, ``beta``, ``gamma-complement``,
    ``halfexp`` or ``dirac``).
    """

    w: WeightDistribution
    v: WeightDistribution
    v_kind: str

    def v_moment(self, n: int) -> float:
        return moment(self.v, n)

    def identity_defect(self, n_max: int = 50) -> float:
        """max_{n ≤ n_max} |(1+n) E[W^n] E[V^n] - 1|."""
        return max(abs((1 + n) * moment(self.w, n) * moment(self.v, n) - 1.0) for n in range(n_max + 1))


def paired_v(w: WeightDistribution) -> PairedWeight:
    """Known closed-form pairings.

    - W = 1: V ~ Uniform(0, 1)
    - W ~ Beta(1, b), b < 1: V ~ Beta(1 + b, 1 - b)
    - -log W ~ Gamma(a, 1), a < 1: -log V ~ Gamma(1 - a, 1)
    - -log W ~ Bernoulli(1/2)·Exp(1): -log V ~ Exp(1)/2, so V ~ Beta(2, 1)
    - W ~ Uniform(0, 1): V = 1
    """
    if w.kind == "dirac":
        return PairedWeight(w, WeightDistribution.uniform(), "uniform")
    if w.kind == "uniform" or (w.kind == "beta" and w.a == 1 and w.b == 1):
        return PairedWeight(w, WeightDistribution.dirac(), "dirac")
    if w.kind == "beta" and w.a == 1 and w.b < 1:
        return PairedWeight(w, WeightDistribution.beta(1 + w.b, 1 - w.b), "beta")
    if w.kind == "expgamma" and w.a < 1:
        return PairedWeight(w, WeightDistribution.expgamma(1 - w.a), "gamma-complement")
    if w.kind == "bemix":
        return PairedWeight(w, WeightDistribution.beta(2, 1), "halfexp")
    raise NoKnownPairing(
        f"no closed-form V is known for W = {w}; existence of V with WV ~ Uniform(0,1) is undecided"
    )


# ---------------------------------------------------------------------------
# expectation rules


@dataclass(frozen=True)
class QuadratureRule:
    """Discrete approximation of the law of W.

    ``nodes``/``weights`` cover the absolutely continuous part; ``atoms``
    holds (location, mass) pairs.  All masses together sum to 1.
    """

    nodes: np.ndarray
    weights: np.ndarray
    atoms: tuple = field(default=())

    @property
    def all_nodes(self) -> np.ndarray:
        return np.concatenate([self.nodes, [p for p, _ in self.atoms]])

    @property
    def all_weights(self) -> np.ndarray:
        return np.concatenate([self.weights, [m for _, m in self.atoms]])

    def expect(self, g):
        """E[g(W)] for a vectorized ``g`` returning shape (k,) or (k, d)."""
        return np.tensordot(self.all_weights, np.asarray(g(self.all_nodes), dtype=float), axes=(0, 0))


_EMPTY = np.empty(0)


@lru_cache(maxsize=256)
def expectation_rule(w: WeightDistribution, nodes: int | None = None) -> QuadratureRule:
    """Gaussian rule integrating functions of W against its law."""
    n = nodes or default_nodes()
    if n < 2:
        raise ValueError("a rule needs at least 2 nodes")
    if w.kind == "dirac":
        return QuadratureRule(_EMPTY, _EMPTY, ((1.0, 1.0),))
    if w.kind == "uniform":
        u, q = gauss_legendre01(n)
        return QuadratureRule(u, q)
    if w.kind == "beta":
        # density ∝ w^{a-1} (1-w)^{b-1}
        u, q = gauss_jacobi01(w.b - 1.0, w.a - 1.0, n)
        return QuadratureRule(u, q / q.sum())
    if w.kind == "expgamma":
        # W = e^{-G}, G ~ Gamma(a, 1)
        g, q = gauss_laguerre(w.a - 1.0, n)
        return QuadratureRule(np.exp(-g), q / q.sum())
    # bemix: half mass at 1, half Uniform(0, 1)
    u, q = gauss_legendre01(n)
    return QuadratureRule(u, 0.5 * q, ((1.0, 0.5),))


def expectation(w: WeightDistribution, g, nodes: int | None = None, rtol: float = 1e-9,
                atol: float = 1e-15, max_nodes: int = 1024):
    """E[g(W)] with node doubling until successive rules agree to ``rtol``."""
    n = nodes or default_nodes()
    prev = expectation_rule(w, n).expect(g)
    if w.kind == "dirac":
        return prev
    while n < max_nodes:
        n *= 2
        cur = expectation_rule(w, n).expect(g)
        if np.all(np.abs(cur - prev) <= rtol * np.abs(cur) + atol):
            return cur
        prev = cur
    return prev


def sample(w: WeightDistribution, size: int, rng: np.random.Generator) -> np.ndarray:
    """Monte-Carlo draws of W (test oracle only)."""
    if w.kind == "dirac":
        return np.ones(size)
    if w.kind == "uniform":
        return rng.random(size)
    if w.kind == "beta":
        return rng.beta(w.a, w.b, size)
    if w.kind == "expgamma":
        return np.exp(-rng.gamma(w.a, 1.0, size))
    return np.where(rng.random(size) < 0.5, 1.0, rng.random(size))


# ---------------------------------------------------------------------------
# text grammar: dirac | beta:a,b | expgamma:a | bemix | uniform

_NUMBER = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


def parse_numbers(text: str, start: int, source: str | None = None) -> list[float]:
    """Parse a comma-separated number list beginning at ``text[start:]``."""
    source = source if source is not None else text
    values = []
    pos = start
    if pos >= len(text):
        raise ParseError("expected a number", source, pos)
    while True:
        m = _NUMBER.match(text, pos)
        if not m:
            raise ParseError("expected a number", source, pos)
        values.append(float(m.group()))
        pos = m.end()
        if pos == len(text):
            return values
        if text[pos] != ",":
            raise ParseError("expected ',' between numbers", source, pos)
        pos += 1


def parse_weight(text: str) -> WeightDistribution:
    """Parse the weight grammar used on the command line."""
    text = text.strip()
    name, sep, _ = text.partition(":")
    name = name.lower()
    if name not in KINDS:
        raise ParseError(f"unknown weight {name!r}; expected one of {', '.join(KINDS)}", text, 0)
    params = parse_numbers(text, len(name) + 1) if sep else []
    expected = {"beta": 2, "expgamma": 1}.get(name, 0)
    if len(params) != expected:
        raise ParseError(f"weight {name!r} takes {expected} parameter(s), got {len(params)}", text, len(name))
    try:
        if name == "beta":
            return WeightDistribution.beta(*params)
        if name == "expgamma":
            return WeightDistribution.expgamma(params[0])
        return WeightDistribution(name)
    except ValueError as exc:
        raise ParseError(str(exc), text, len(name) + 1) from exc
