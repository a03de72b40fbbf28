"""Necessary-condition probes for the existence of a paired variable V.

Given W, a V with WV ~ Uniform(0, 1) must have moments
E[V^r] = 1/((1+r)E[W^r]), and -log V must have characteristic function
φ(u) = φ_{Exp(1)}(u)/φ_{-log W}(u).  Both conditions are necessary only, so
the probes report a violation or stay inconclusive; they never claim that
V exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special

from .errors import BracketError, DomainError
from .reporting import dumps
from .specfun import as_moments
from .weights import WeightDistribution

NO_V_EXISTS = "NO-V-EXISTS"
INCONCLUSIVE = "INCONCLUSIVE"
PASS = "PASS"
FAIL = "FAIL"

MODULUS_TOL = 1e-9
MONOTONICITY_TOL = 1e-10


@dataclass
class ProbeReport:
    """Serializable probe outcome: {probe, params, grid, values, verdict, violations}."""

    probe: str
    params: dict = field(default_factory=dict)
    grid: list = field(default_factory=list)
    values: object = None
    verdict: str = INCONCLUSIVE
    violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"probe": self.probe, "params": self.params, "grid": self.grid, "values": self.values,
                "verdict": self.verdict, "violations": self.violations}

    def to_json(self, indent: int | None = 2) -> str:
        return dumps(self.to_dict(), indent=indent)


# ---------------------------------------------------------------------------
# moment sequences


@dataclass(frozen=True)
class MomentSequence:
    """Finite sequence m_0..m_R with m_0 = 1 and m_r > 0."""

    values: tuple
    source: str = ""

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("a moment sequence needs at least m_0 and m_1")
        if abs(self.values[0] - 1.0) > 1e-15:
            raise ValueError("m_0 must equal 1")
        if any(not v > 0 for v in self.values):
            raise ValueError("moments must be positive")

    @property
    def R(self) -> int:
        return len(self.values) - 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def candidate_v_moments(w, R: int) -> MomentSequence:
    """The moments 1/((1+r)E[W^r]), r = 0..R, that a paired V would need.

    ``w`` is a :class:`WeightDistribution` or any moment provider.
    """
    if R < 1:
        raise ValueError("R must be at least 1")
    m = as_moments(w)
    return MomentSequence(tuple(1.0 / ((1 + r) * m(r)) for r in range(R + 1)), source=str(w))


@dataclass(frozen=True)
class MonotonicityVerdict:
    verdict: str
    max_order: int
    violations: tuple = ()

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def first_violation(self):
        return self.violations[0] if self.violations else None


def alternating_differences(m: MomentSequence, max_order: int) -> list[np.ndarray]:
    """Rows (-1)^k Δ^k m_r for k = 0..max_order, r = 0..R-k."""
    row = m.as_array()
    rows = [row]
    for _ in range(max_order):
        row = row[:-1] - row[1:]
        rows.append(row)
    return rows


def complete_monotonicity_check(m: MomentSequence, max_order: int, tol: float = MONOTONICITY_TOL) -> MonotonicityVerdict:
    """Hausdorff necessary condition: (-1)^k Δ^k m_r ≥ -tol whenever r + k ≤ R.

    Violations are listed as (k, r, value), ordered by k then r.
    """
    if not 0 <= max_order <= m.R:
        raise ValueError(f"max_order must lie in [0, {m.R}]")
    violations = []
    for k, row in enumerate(alternating_differences(m, max_order)):
        for r, v in enumerate(row):
            if v < -tol:
                violations.append((k, r, float(v)))
    return MonotonicityVerdict(FAIL if violations else PASS, max_order, tuple(violations))


def moments_probe(w, order: int, R: int | None = None) -> ProbeReport:
    """Complete-monotonicity probe of the candidate V moments of ``w``."""
    R = order if R is None else R
    seq = candidate_v_moments(w, R)
    res = complete_monotonicity_check(seq, order)
    return ProbeReport(
        probe="moments",
        params={"weight": str(w), "order": order, "R": R, "tol": MONOTONICITY_TOL},
        grid=list(range(R + 1)),
        values=list(seq.values),
        verdict=res.verdict,
        violations=[{"k": k, "r": r, "value": v} for k, r, v in res.violations],
    )


# ---------------------------------------------------------------------------
# characteristic-function ratio


@dataclass(frozen=True)
class CharacteristicFunction:
    """Closed-form characteristic function of W̃ = -log W."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)

    def __call__(self, u):
        return self.fn(np.asarray(u, dtype=float))

    @classmethod
    def bernoulli_exp(cls, scale: float = 1.0):
        """scale·Bernoulli(1/2)·Exp(1): half mass at 0, half Exp with mean ``scale``."""
        if not scale > 0:
            raise ValueError("scale must be positive")
        return cls("bernoulli-exp", lambda u: 0.5 + 0.5 / (1.0 - scale * 1j * u), {"scale": scale})

    @classmethod
    def gamma(cls, shape: float):
        if not shape > 0:
            raise ValueError("shape must be positive")
        return cls("gamma", lambda u: (1.0 - 1j * u) ** (-shape), {"shape": shape})

    @classmethod
    def point_mass_zero(cls):
        return cls("zero", lambda u: np.ones_like(u, dtype=complex))

    @classmethod
    def from_weight(cls, w: WeightDistribution):
        """φ_{-log W}(u) = E[W^{-iu}] for the built-in weight families."""
        if w.kind == "dirac":
            return cls.point_mass_zero()
        if w.kind == "uniform":
            return cls.gamma(1.0)
        if w.kind == "expgamma":
            return cls.gamma(w.a)
        if w.kind == "bemix":
            return cls.bernoulli_exp(1.0)
        a, b = w.a, w.b

        def beta_mellin(u):
            z = a - 1j * u
            return np.exp(special.loggamma(z) - special.loggamma(z + b) + special.loggamma(a + b) - special.loggamma(a))

        return cls("beta-log", beta_mellin, {"a": a, "b": b})


def exp1_charfn(u):
    return 1.0 / (1.0 - 1j * np.asarray(u, dtype=float))


@dataclass(frozen=True)
class CharFnProbe:
    u_grid: np.ndarray
    values: np.ndarray
    verdict: str
    violations: tuple = ()

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.values)

    def report(self, params: dict | None = None) -> ProbeReport:
        return ProbeReport(
            probe="charfn",
            params=params or {},
            grid=self.u_grid.tolist(),
            values={"modulus": self.moduli.tolist(), "re": self.values.real.tolist(), "im": self.values.imag.tolist()},
            verdict=self.verdict,
            violations=[{"u": u, "modulus": mod} for u, mod in self.violations],
        )


def charfn_ratio_probe(w_tilde_charfn: CharacteristicFunction, u_grid: Sequence[float],
                       tol: float = MODULUS_TOL) -> CharFnProbe:
    """Evaluate φ = φ_{Exp(1)}/φ_{W̃} on ``u_grid`` and flag |φ(u)| > 1 + tol."""
    u = np.asarray(u_grid, dtype=float)
    phi = exp1_charfn(u) / w_tilde_charfn(u)
    mod = np.abs(phi)
    violations = tuple((float(x), float(m)) for x, m in zip(u, mod) if m > 1.0 + tol)
    return CharFnProbe(u, phi, NO_V_EXISTS if violations else INCONCLUSIVE, violations)


CHARFN_CASES = {
    "example43": lambda: CharacteristicFunction.bernoulli_exp(2.0),
    "example42": lambda: CharacteristicFunction.bernoulli_exp(1.0),
}

DEFAULT_U_GRID = (0.1, 0.2, 0.7)


def charfn_case(name: str) -> CharacteristicFunction:
    """Named probe cases: ``example43``, ``example42``, ``gamma:a`` or ``bemix-scale:s``."""
    if name in CHARFN_CASES:
        return CHARFN_CASES[name]()
    kind, _, arg = name.partition(":")
    try:
        if kind == "gamma":
            return CharacteristicFunction.gamma(float(arg))
        if kind == "bemix-scale":
            return CharacteristicFunction.bernoulli_exp(float(arg))
    except ValueError as exc:
        raise DomainError(f"bad parameter in probe case {name!r}: {exc}") from exc
    raise DomainError(f"unknown probe case {name!r}; expected example43, example42, gamma:a or bemix-scale:s")


# ---------------------------------------------------------------------------
# beta-distributed V: root equations in ã


@dataclass(frozen=True)
class BetaPairingConstraints:
    beta_tilde: float
    alpha_tilde_lower: float


def beta_pairing_constraints(alpha: float, beta: float) -> BetaPairingConstraints:
    """For W ~ Beta(α, β) and V ~ Beta(ã, β̃): β̃ = 1 - β and ã > min{1, α + β}."""
    if not (0 < alpha <= 1 and 0 < beta < 1):
        raise DomainError("need alpha in (0, 1] and beta in (0, 1)")
    return BetaPairingConstraints(1.0 - beta, min(1.0, alpha + beta))


def remark_root_function(alpha: float, beta: float, r: int):
    """F(ã) = log Γ(ã+r) - log Γ(ã+r+1-β) - log[Γ(α+β+r)/((1+r)Γ(α+r))]."""
    target = math.lgamma(alpha + beta + r) - math.log1p(r) - math.lgamma(alpha + r)

    def F(at):
        return math.lgamma(at + r) - math.lgamma(at + r + 1.0 - beta) - target

    F.target = target
    return F


@dataclass(frozen=True)
class RootResult:
    alpha: float
    beta: float
    r: int
    roots: tuple
    residuals: tuple
    bracket: tuple

    @property
    def root(self) -> float:
        return self.roots[0]

    def __float__(self):
        return float(self.root)


def remark_root_solve(alpha: float, beta: float, r: int, upper: float = 50.0, scan_points: int = 4000,
                      xtol: float = 1e-12) -> RootResult:
    """All roots ã of Γ(ã+r)/Γ(ã+r+1-β) = Γ(α+β+r)/((1+r)Γ(α+r)) on (min{1, α+β}, upper).

    The bracket is scanned for sign changes and every one is refined by
    bisection.  Residuals are relative, |F(ã)|/max(1, |log target|).
    """
    if r < 1:
        raise DomainError("r must be at least 1")
    lower = beta_pairing_constraints(alpha, beta).alpha_tilde_lower
    F = remark_root_function(alpha, beta, r)
    xs = np.linspace(lower, upper, scan_points + 1)[1:]
    xs = np.concatenate([[lower + 1e-12], xs])
    vals = np.array([F(x) for x in xs])
    roots = []
    for x0, x1, f0, f1 in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if f0 == 0:
            roots.append(float(x0))
        elif f0 * f1 < 0:
            roots.append(float(optimize.bisect(F, x0, x1, xtol=xtol, rtol=4 * np.finfo(float).eps)))
    if vals[-1] == 0:
        roots.append(float(xs[-1]))
    if not roots:
        raise BracketError(f"no sign change of the root equation on ({lower:g}, {upper:g}) for r={r}")
    scale = max(1.0, abs(F.target))
    return RootResult(alpha, beta, r, tuple(roots), tuple(abs(F(x)) / scale for x in roots), (lower, upper))


def remark_roots_probe(alpha: float, beta: float, rs: Sequence[int] = (1, 2),
                       threshold: float = 1e-3) -> ProbeReport:
    """Solve for several r; differing roots rule out a beta-distributed V.

    Verdict ``NO-V-EXISTS`` (no Beta V for this W) when the first roots
    differ by more than ``threshold``, otherwise ``INCONCLUSIVE``.
    """
    results = [remark_root_solve(alpha, beta, r) for r in rs]
    roots = [res.root for res in results]
    spread = max(roots) - min(roots)
    violations = []
    if spread > threshold:
        violations.append({"discrepancy": spread, "threshold": threshold})
    return ProbeReport(
        probe="remark-roots",
        params={"alpha": alpha, "beta": beta, "beta_tilde": 1.0 - beta, "threshold": threshold},
        grid=list(rs),
        values={"roots": roots, "all_roots": [list(res.roots) for res in results],
                "residuals": [list(res.residuals) for res in results]},
        verdict=NO_V_EXISTS if violations else INCONCLUSIVE,
        violations=violations,
    )
