"""Series and fixed-point solvers for equations D x = f(t, x).

Power series are the main currency: with D t^n = n E[W^{n-1}] t^{n-1}, the
operator acts on coefficients by x_n ↦ x_{n+1}(n+1)E[W^n], and its paired
integral by x_n ↦ x_n / ((n+1)E[W^n]) one slot up.  Nonlinear polynomial
fields are solved coefficient by coefficient through Cauchy products.

The Picard solver works on grids instead and only needs the law of the
paired variable V.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DivergenceError, DomainError, SingularityError
from .operators import c_alpha, c_alpha_prime
from .reporting import dumps, to_jsonable
from .specfun import as_moments, new_ml_coefficients, new_ml_matrix
from .weights import PairedWeight, WeightDistribution, expectation_rule, paired_v, require_admissible


# ---------------------------------------------------------------------------
# power series


class PowerSeries:
    """Truncated power series Σ_{n≤N} x_n t^n with scalar or vector coefficients.

    ``coeffs`` has shape (N+1,) or (N+1, d).
    """

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim == 0:
            c = c.reshape(1)
        if c.ndim > 2 or c.shape[0] == 0:
            raise ValueError("coefficients must have shape (N+1,) or (N+1, d)")
        self.coeffs = c

    @property
    def N(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def dim(self) -> int | None:
        return None if self.coeffs.ndim == 1 else self.coeffs.shape[1]

    def __repr__(self):
        return f"PowerSeries(N={self.N}, dim={self.dim})"

    def __len__(self):
        return self.coeffs.shape[0]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + self.coeffs.shape[1:])
        tt = t[..., None] if self.coeffs.ndim == 2 else t
        for c in self.coeffs[::-1]:
            out = out * tt + c
        return out

    def derivative(self) -> "PowerSeries":
        """Ordinary term-wise derivative."""
        if self.N == 0:
            return PowerSeries(np.zeros_like(self.coeffs))
        n = np.arange(1, self.N + 1, dtype=float)
        scale = n if self.coeffs.ndim == 1 else n[:, None]
        return PowerSeries(self.coeffs[1:] * scale)

    def component(self, i: int) -> "PowerSeries":
        return PowerSeries(self.coeffs[:, i])

    def truncate(self, N: int) -> "PowerSeries":
        return PowerSeries(self.coeffs[: N + 1])

    def _aligned(self, other):
        if isinstance(other, PowerSeries):
            N = min(self.N, other.N)
            return self.coeffs[: N + 1], other.coeffs[: N + 1]
        return None

    def __add__(self, other):
        pair = self._aligned(other)
        if pair is None:
            c = self.coeffs.copy()
            c[0] = c[0] + other
            return PowerSeries(c)
        return PowerSeries(pair[0] + pair[1])

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        pair = self._aligned(other)
        if pair is None:
            return PowerSeries(self.coeffs * other)
        a, b = pair
        N = a.shape[0] - 1
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for n in range(N + 1):
            out[n] = np.sum(a[: n + 1] * b[n::-1], axis=0)
        return PowerSeries(out)

    __rmul__ = __mul__


def _factors(moments, count: int) -> np.ndarray:
    """(n+1) E[W^n] for n = 0..count-1."""
    m = as_moments(moments)
    return np.array([(n + 1) * m(n) for n in range(count)], dtype=float)


def _col(f, coeffs):
    return f if coeffs.ndim == 1 else f[:, None]


def series_d(xs: PowerSeries, moments) -> PowerSeries:
    """Apply D coefficient-wise: output n is x_{n+1} (n+1) E[W^n]."""
    if xs.N == 0:
        return PowerSeries(np.zeros_like(xs.coeffs))
    f = _factors(moments, xs.N)
    return PowerSeries(xs.coeffs[1:] * _col(f, xs.coeffs))


def series_j(xs: PowerSeries, moments) -> PowerSeries:
    """Apply the paired integral J: output n+1 is x_n / ((n+1) E[W^n]), output 0 is 0."""
    f = _factors(moments, xs.N + 1)
    out = np.zeros((xs.N + 2,) + xs.coeffs.shape[1:])
    out[1:] = xs.coeffs / _col(f, xs.coeffs)
    return PowerSeries(out)


def radius_estimate(xs: PowerSeries, tail: int = 8) -> float:
    """Heuristic convergence radius from the root test on the last ``tail`` coefficients.

    Returns ``inf`` for a terminating series, detected as two vanishing
    trailing coefficients (one is not enough for odd or even functions).
    """
    c = xs.coeffs if xs.coeffs.ndim == 1 else np.abs(xs.coeffs).max(axis=1)
    if xs.N >= 1 and c[-1] == 0 and c[-2] == 0:
        return math.inf
    roots = [abs(c[n]) ** (1.0 / n) for n in range(max(1, xs.N - tail + 1), xs.N + 1) if c[n] != 0]
    if not roots:
        return math.inf
    rho = max(roots)
    return math.inf if rho == 0 else float(1.0 / rho)


# ---------------------------------------------------------------------------
# solver reports


@dataclass
class SolverReport:
    """Outcome of a solver run; serializes to a stable JSON layout.

    Non-finite numbers (e.g. an infinite radius estimate) serialize as null.
    """

    solver: str
    params: dict = field(default_factory=dict)
    grid: Any = None
    values: Any = None
    series_coeffs: Any = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def series(self) -> PowerSeries | None:
        return None if self.series_coeffs is None else PowerSeries(self.series_coeffs)

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "params": to_jsonable(self.params),
            "grid": to_jsonable(self.grid),
            "values": to_jsonable(self.values),
            "series_coeffs": to_jsonable(self.series_coeffs),
            "diagnostics": to_jsonable(self.diagnostics),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "SolverReport":
        return cls(**{k: data.get(k) for k in ("solver", "params", "grid", "values", "series_coeffs", "diagnostics")})

    @classmethod
    def from_json(cls, text: str) -> "SolverReport":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# linear systems


def solve_linear(A, x0, moments, t_grid, N: int = 32) -> SolverReport:
    """Solve D x = A x, x(0) = x0, via x(t) = ℰ(tA) x0 on ``t_grid``.

    The report also carries the first N+1 series coefficients ℰ's
    coefficients times Aⁿx0, and the coefficient residual of D x - A x.
    """
    if isinstance(moments, WeightDistribution):
        require_admissible(moments)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if A.shape != (x0.size, x0.size):
        raise ValueError(f"A has shape {A.shape} but x0 has {x0.size} components")
    grid = np.asarray(t_grid, dtype=float)
    values = np.array([new_ml_matrix(moments, A, float(t)) @ x0 for t in grid])
    c = new_ml_coefficients(moments, N + 1)
    coeffs = np.empty((N + 1, x0.size))
    v = x0.copy()
    for n in range(N + 1):
        coeffs[n] = c[n] * v
        v = A @ v
    xs = PowerSeries(coeffs)
    residual = series_d(xs, moments).coeffs - (A @ coeffs[:N].T).T
    return SolverReport(
        solver="linear",
        params={"A": A, "x0": x0, "weight": str(moments), "N": N},
        grid=grid,
        values=values,
        series_coeffs=coeffs,
        diagnostics={"residual": float(np.max(np.abs(residual))) if N > 0 else 0.0},
    )


# ---------------------------------------------------------------------------
# polynomial vector fields


@dataclass(frozen=True)
class PolynomialField:
    """Polynomial right-hand side.

    Scalar fields are Σ a_i x^i (``coeffs`` = (a_0, ..., a_m)).  Systems are
    at most quadratic: f(x)_i = c_i + Σ_j L_ij x_j + Σ_jk Q_ijk x_j x_k.
    """

    coeffs: tuple | None = None
    const: np.ndarray | None = None
    linear: np.ndarray | None = None
    quadratic: np.ndarray | None = None

    @classmethod
    def scalar(cls, coeffs: Sequence[float]):
        if len(coeffs) == 0:
            raise ValueError("a scalar field needs at least a_0")
        return cls(coeffs=tuple(float(a) for a in coeffs))

    @classmethod
    def logistic(cls, mu: float, K: float):
        """μ x (1 - x/K)."""
        return cls.scalar((0.0, mu, -mu / K))

    @classmethod
    def system(cls, const=None, linear=None, quadratic=None, dim: int | None = None):
        arrays = [np.asarray(a, dtype=float) for a in (const, linear, quadratic) if a is not None]
        d = dim or (arrays[0].shape[0] if arrays else None)
        if d is None:
            raise ValueError("cannot infer system dimension")
        const = np.zeros(d) if const is None else np.asarray(const, dtype=float)
        linear = np.zeros((d, d)) if linear is None else np.asarray(linear, dtype=float)
        quadratic = np.zeros((d, d, d)) if quadratic is None else np.asarray(quadratic, dtype=float)
        if const.shape != (d,) or linear.shape != (d, d) or quadratic.shape != (d, d, d):
            raise ValueError("inconsistent system field shapes")
        return cls(const=const, linear=linear, quadratic=quadratic)

    @classmethod
    def sir(cls, beta: float, gamma: float):
        Q = np.zeros((3, 3, 3))
        Q[0, 0, 1] = -beta
        Q[1, 0, 1] = beta
        L = np.zeros((3, 3))
        L[1, 1] = -gamma
        L[2, 1] = gamma
        return cls.system(linear=L, quadratic=Q)

    @property
    def is_scalar(self) -> bool:
        return self.coeffs is not None

    def __call__(self, x):
        """Evaluate at states x of shape (...,) for scalar or (..., d) for systems."""
        x = np.asarray(x, dtype=float)
        if self.is_scalar:
            return np.polynomial.polynomial.polyval(x, self.coeffs)
        return self.const + x @ self.linear.T + np.einsum("ijk,...j,...k->...i", self.quadratic, x, x)


def solve_polynomial(field_: PolynomialField, x0, moments, N: int = 32, t_grid=None) -> SolverReport:
    """Power-series solution of D x = f(x) for a polynomial field.

    x_{n+1} = [n-th coefficient of f(x)] / ((n+1) E[W^n]), with the powers
    of x maintained as running Cauchy products.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if isinstance(moments, WeightDistribution):
        require_admissible(moments)
    fac = _factors(moments, N)
    if field_.is_scalar:
        a = np.asarray(field_.coeffs)
        m = len(a) - 1
        x = np.zeros(N + 1)
        x[0] = float(x0)
        powers = np.zeros((m + 1, N + 1))
        powers[0, 0] = 1.0
        with np.errstate(over="ignore", invalid="ignore"):
            for n in range(N):
                for i in range(1, m + 1):
                    powers[i, n] = np.dot(powers[i - 1, : n + 1], x[n::-1])
                x[n + 1] = np.dot(a, powers[:, n]) / fac[n]
    else:
        x0 = np.asarray(x0, dtype=float)
        d = x0.size
        x = np.zeros((N + 1, d))
        x[0] = x0
        with np.errstate(over="ignore", invalid="ignore"):
            for n in range(N):
                fn = field_.linear @ x[n] + np.einsum("ijk,mj,mk->i", field_.quadratic, x[: n + 1], x[n::-1])
                if n == 0:
                    fn = fn + field_.const
                x[n + 1] = fn / fac[n]
    xs = PowerSeries(x)
    finite = np.all(np.isfinite(x), axis=tuple(range(1, x.ndim))) if x.ndim > 1 else np.isfinite(x)
    if not np.all(finite):
        last = int(np.argmin(finite))
        radius = radius_estimate(PowerSeries(x[:last]))
        raise DivergenceError(
            f"series coefficients overflow at n={last}; estimated radius {radius:.4g}",
            diagnostics={"radius_estimate": radius, "overflow_index": last},
        )
    # substitute back: D(x) - f(x) coefficient-wise
    fx = _field_series(field_, xs)
    residual = float(np.max(np.abs(series_d(xs, moments).coeffs - fx.coeffs[:N])))
    radius = radius_estimate(xs)
    grid = None if t_grid is None else np.asarray(t_grid, dtype=float)
    diagnostics = {"residual": residual, "radius_estimate": radius, "radius_is_heuristic": True}
    if grid is not None:
        diagnostics["grid_beyond_radius"] = bool(np.any(grid >= radius))
    return SolverReport(
        solver="poly",
        params={"field": field_.coeffs if field_.is_scalar else "system", "x0": x0, "weight": str(moments), "N": N},
        grid=grid,
        values=None if grid is None else xs(grid),
        series_coeffs=x,
        diagnostics=diagnostics,
    )


def _field_series(field_: PolynomialField, xs: PowerSeries) -> PowerSeries:
    if field_.is_scalar:
        out = PowerSeries(np.zeros(xs.N + 1))
        power = PowerSeries(np.eye(1, xs.N + 1).ravel())
        for a in field_.coeffs:
            out = out + power * a
            power = power * xs
        return out
    c = xs.coeffs
    N = xs.N
    out = c @ field_.linear.T
    out[0] += field_.const
    for n in range(N + 1):
        out[n] += np.einsum("ijk,mj,mk->i", field_.quadratic, c[: n + 1], c[n::-1])
    return PowerSeries(out)


# ---------------------------------------------------------------------------
# SIR


@dataclass(frozen=True)
class SirParams:
    beta_inf: float
    gamma_rec: float
    s0: float
    i0: float
    r0: float = 0.0

    def __post_init__(self):
        if not (self.beta_inf > 0 and self.gamma_rec > 0):
            raise ValueError("infection and recovery rates must be positive")
        if min(self.s0, self.i0, self.r0) < 0:
            raise ValueError("initial fractions must be non-negative")


def sir_coefficients(beta: float, gamma: float, s0: float, i0: float, r0: float, moments, N: int):
    """Coefficient recursion for the SIR system, allowing beta = 0."""
    fac = _factors(moments, N)
    s, i, r = np.zeros(N + 1), np.zeros(N + 1), np.zeros(N + 1)
    s[0], i[0], r[0] = s0, i0, r0
    for n in range(N):
        si = np.dot(s[: n + 1], i[n::-1])
        s[n + 1] = -beta * si / fac[n]
        i[n + 1] = (beta * si - gamma * i[n]) / fac[n]
        r[n + 1] = gamma * i[n] / fac[n]
    return s, i, r


def solve_sir(p: SirParams, moments, N: int = 32, t_grid=None) -> SolverReport:
    """Series solution of D S = -βSI, D I = βSI - γI, D R = γI."""
    if isinstance(moments, WeightDistribution):
        require_admissible(moments)
    s, i, r = sir_coefficients(p.beta_inf, p.gamma_rec, p.s0, p.i0, p.r0, moments, N)
    coeffs = np.column_stack([s, i, r])
    xs = PowerSeries(coeffs)
    total = coeffs.sum(axis=1)
    grid = None if t_grid is None else np.asarray(t_grid, dtype=float)
    radius = radius_estimate(xs)
    diagnostics = {
        "conservation_defect": float(np.max(np.abs(total[1:]))) if N > 0 else 0.0,
        "radius_estimate": radius,
        "radius_is_heuristic": True,
    }
    return SolverReport(
        solver="sir",
        params={"beta": p.beta_inf, "gamma": p.gamma_rec, "x0": [p.s0, p.i0, p.r0], "weight": str(moments), "N": N},
        grid=grid,
        values=None if grid is None else xs(grid),
        series_coeffs=coeffs,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Picard iteration for x = x0 + J f(t, x)


class ContractionBoundError(DomainError):
    """The Picard horizon violates T* < min(b/|f|, 1/M) or T* <= a."""


@dataclass(frozen=True)
class PicardConfig:
    """Setup of the fixed-point iteration on [0, T*].

    ``b`` is the sup-norm radius of the ball around x0, ``a`` the time cap
    of the rectangle, ``M`` a Lipschitz constant of f on it and
    ``f_bound`` its sup there.  When ``f_bound`` is omitted it is estimated
    by sampling f over the rectangle.
    """

    T_star: float
    M: float
    b: float
    a: float | None = None
    f_bound: float | None = None
    grid_size: int = 513
    max_iter: int = 200
    tol: float = 1e-13
    nodes: int | None = None

    def __post_init__(self):
        if not (self.T_star > 0 and self.b > 0 and self.M >= 0):
            raise ValueError("T_star and b must be positive and M non-negative")
        if self.grid_size < 4:
            raise ValueError("grid_size must be at least 4")


def _estimate_f_bound(f, x0, cfg: PicardConfig, samples: int = 4096) -> float:
    rng = np.random.default_rng(12345)
    d = x0.size
    t_cap = cfg.a if cfg.a is not None else cfg.T_star
    t = rng.uniform(0, t_cap, samples)
    x = x0 + rng.uniform(-cfg.b, cfg.b, (samples, d))
    corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * d)).reshape(d, -1).T if d <= 8 else np.empty((0, d))
    if corners.size:
        t = np.concatenate([t, np.repeat([0.0, t_cap], len(corners))])
        x = np.vstack([x, x0 + cfg.b * np.vstack([corners, corners])])
    return float(np.max(np.abs(f(t, x))))


def check_picard_bound(f, x0, cfg: PicardConfig) -> dict:
    """Validate the existence-horizon bound; returns the quantities checked."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    f_bound = cfg.f_bound if cfg.f_bound is not None else _estimate_f_bound(f, x0, cfg)
    limit = min(cfg.b / f_bound if f_bound > 0 else math.inf, 1.0 / cfg.M if cfg.M > 0 else math.inf)
    info = {"f_bound": f_bound, "f_bound_estimated": cfg.f_bound is None, "T_star_limit": limit,
            "contraction_bound": cfg.M * cfg.T_star}
    if cfg.a is not None and cfg.T_star > cfg.a:
        raise ContractionBoundError(f"Picard horizon T*={cfg.T_star} exceeds the rectangle time cap a={cfg.a}")
    if not cfg.T_star < limit:
        raise ContractionBoundError(
            f"Picard horizon violates T* < min(b/|f|, 1/M): T*={cfg.T_star}, "
            f"b/|f|={cfg.b / f_bound if f_bound > 0 else math.inf:.6g}, "
            f"1/M={1.0 / cfg.M if cfg.M > 0 else math.inf:.6g}, M*T*={cfg.M * cfg.T_star:.6g}"
        )
    return info


def solve_picard(f: Callable, x0, paired: PairedWeight | WeightDistribution, cfg: PicardConfig) -> SolverReport:
    """Fixed-point iteration x_{k+1}(t) = x0 + t E[f(tV, x_k(tV))] on a uniform grid.

    ``f(t, x)`` must be vectorized: t of shape (K,), x of shape (K, d),
    returning shape (K, d).  Off-grid values x_k(tV) come from a cubic
    spline through the current iterate.
    """
    if isinstance(paired, WeightDistribution):
        paired = paired_v(paired)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    d = x0.size
    bound_info = check_picard_bound(f, x0, cfg)
    grid = np.linspace(0.0, cfg.T_star, cfg.grid_size)
    rule = expectation_rule(paired.v, cfg.nodes)
    v, q = rule.all_nodes, rule.all_weights
    s = grid[:, None] * v[None, :]
    X = np.tile(x0, (cfg.grid_size, 1))
    changes = []
    for k in range(1, cfg.max_iter + 1):
        xs = CubicSpline(grid, X, axis=0)(s.ravel())
        fs = np.asarray(f(s.ravel(), xs), dtype=float).reshape(cfg.grid_size, v.size, d)
        X_new = x0 + grid[:, None] * np.einsum("j,gjd->gd", q, fs)
        change = float(np.max(np.abs(X_new - X)))
        X = X_new
        changes.append(change)
        if not math.isfinite(change):
            raise DivergenceError("Picard iterates became non-finite", {"changes": changes})
        if change < cfg.tol:
            break
        if len(changes) >= 4 and changes[-1] > changes[-2] > changes[-3] > changes[-4]:
            raise DivergenceError(
                f"Picard iteration is not contracting (M*T*={cfg.M * cfg.T_star:.4g} must be < 1)",
                {"changes": changes},
            )
    else:
        raise DivergenceError(
            f"Picard iteration did not reach tol={cfg.tol} in {cfg.max_iter} iterations",
            {"changes": changes},
        )
    ratios = [changes[i + 1] / changes[i] for i in range(1, len(changes) - 1) if changes[i] > 0]
    return SolverReport(
        solver="picard",
        params={"x0": x0, "v_law": str(paired.v), "w_law": str(paired.w), "T_star": cfg.T_star,
                "M": cfg.M, "b": cfg.b, "grid_size": cfg.grid_size},
        grid=grid,
        values=X,
        diagnostics={
            "iterations": len(changes),
            "final_change": changes[-1],
            "changes": changes,
            "contraction_estimate": max(ratios) if ratios else 0.0,
            **bound_info,
        },
    )


def picard_interpolant(report: SolverReport) -> CubicSpline:
    return CubicSpline(np.asarray(report.grid), np.asarray(report.values), axis=0)


# ---------------------------------------------------------------------------
# normalized Caputo-Fabrizio equation: integral form vs ODE reduction


def _central_diff(fn, z, scale=1.0):
    h = 1e-6 * np.maximum(1.0, np.abs(z)) * scale
    return (fn(z + h) - fn(z - h)) / (2 * h)


def ncf_equation_suite(f: Callable, x0: float, alpha: float, grid, f_t: Callable | None = None,
                       f_x: Callable | None = None, internal_points: int = 2049, tol: float = 1e-13,
                       max_iter: int = 1000) -> SolverReport:
    """Solve the NCF equation twice and compare.

    The integral path iterates x = x0 + (1-α)c_α(t) f(t,x) + α ∫₀ᵗ c_α f ds
    to a fixed point (spline quadrature).  The ODE path integrates the differentiated form
    x' = [(1-α)c_α' f + (1-α)c_α f_t + α c_α f] / (1 - (1-α)c_α f_x) with RK4.
    Both run on a fine uniform grid and are interpolated to ``grid``.
    Missing partial derivatives are taken by central differences.
    """
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must start at 0 and increase strictly")
    T = float(grid[-1])
    tt = np.linspace(0.0, T, max(internal_points, grid.size))
    h = tt[1] - tt[0]
    if f_t is None:
        f_t = lambda t, x: _central_diff(lambda s: f(s, x), t)  # noqa: E731
    if f_x is None:
        f_x = lambda t, x: _central_diff(lambda y: f(t, y), x)  # noqa: E731

    # ODE path first, so a vanishing denominator is reported as such
    # rather than as divergence of the fixed-point iteration
    den_sign = []

    def rhs(t, x):
        ct, dct = c_alpha(alpha, t), c_alpha_prime(alpha, t)
        fv = f(t, x)
        den = float(1.0 - (1 - alpha) * ct * f_x(t, x))
        # a step may jump over the zero, so a sign flip counts as well
        if abs(den) < 1e-8 or (den_sign and math.copysign(1.0, den) != den_sign[0]):
            raise SingularityError(
                f"ODE reduction is singular near t={float(t):.6g}: 1 - (1-alpha) c(t) f_x = {den:.3g}"
            )
        if not den_sign:
            den_sign.append(math.copysign(1.0, den))
        return ((1 - alpha) * dct * fv + (1 - alpha) * ct * f_t(t, x) + alpha * ct * fv) / den

    Y = np.empty_like(tt)
    Y[0] = x0
    for n in range(tt.size - 1):
        t, y = tt[n], Y[n]
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        Y[n + 1] = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    # integral path: fixed point of the integral equation
    c = c_alpha(alpha, tt)
    X = np.full_like(tt, float(x0))
    changes = []
    for _ in range(max_iter):
        g = c * f(tt, X)
        integral = CubicSpline(tt, g).antiderivative()(tt)
        X_new = x0 + (1 - alpha) * c * f(tt, X) + alpha * integral
        change = float(np.max(np.abs(X_new - X)))
        X = X_new
        changes.append(change)
        if not math.isfinite(change) or (len(changes) > 5 and change > 10 * changes[0]):
            raise DivergenceError("NCF integral-equation iteration diverged", {"changes": changes})
        if change < tol:
            break
    else:
        raise DivergenceError("NCF integral-equation iteration did not converge", {"changes": changes})

    xi = CubicSpline(tt, X)(grid)
    yo = CubicSpline(tt, Y)(grid)
    return SolverReport(
        solver="ncf-suite",
        params={"x0": x0, "alpha": alpha, "internal_points": tt.size},
        grid=grid,
        values={"integral": xi, "ode": yo},
        diagnostics={"sup_difference": float(np.max(np.abs(xi - yo))), "iterations": len(changes),
                     "final_change": changes[-1]},
    )
