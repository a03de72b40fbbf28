"""Command-line front end: ``memfrac eval | solve | probe``.

Exit codes: 0 success, 2 parse error, 3 axiom or domain error, 4 solver
divergence or accuracy failure.  Output is deterministic: floats are
written with shortest round-trip formatting and CSV always uses ``.`` as
the decimal mark.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from .errors import (
    AccuracyError,
    AxiomError,
    BracketError,
    DivergenceError,
    DomainError,
    NoKnownPairing,
    ParseError,
)
from .moment_analysis import DEFAULT_U_GRID, charfn_case, charfn_ratio_probe, moments_probe, remark_roots_probe
from .operators import OPERATOR_KINDS, OperatorSpec, SampledFunction
from .reporting import dumps, to_jsonable
from .series_solve import (
    PicardConfig,
    PolynomialField,
    PowerSeries,
    SirParams,
    ncf_equation_suite,
    solve_linear,
    solve_picard,
    solve_polynomial,
    solve_sir,
)
from .weights import parse_numbers, parse_weight

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_DIVERGENCE = 0, 2, 3, 4


# ---------------------------------------------------------------------------
# argument-string parsers


def parse_grid(text: str) -> np.ndarray:
    """``start:end:step`` → points start, start+step, ..., end (inclusive when it lands on the grid)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError("grid must look like start:end:step", text, 0)
    values, pos = [], 0
    for part in parts:
        nums = parse_numbers(text[: pos + len(part)], pos, text)
        if len(nums) != 1:
            raise ParseError("expected a single number", text, pos)
        values.append(nums[0])
        pos += len(part) + 1
    start, end, step = values
    if not step > 0:
        raise ParseError("grid step must be positive", text, len(parts[0]) + len(parts[1]) + 2)
    if end < start:
        raise ParseError("grid end must not precede start", text, len(parts[0]) + 1)
    n = int(np.floor((end - start) / step + 1e-9))
    grid = start + step * np.arange(n + 1)
    if abs(grid[-1] - end) <= 1e-9 * step:
        grid[-1] = end
    return grid


def parse_function(text: str) -> SampledFunction:
    """``poly:c0,c1,...`` | ``series:c0,c1,...`` | ``exp`` | ``sin`` | ``cos`` | ``one``."""
    name, sep, _ = text.partition(":")
    if name in ("poly", "series"):
        if not sep:
            raise ParseError(f"{name} needs coefficients, e.g. {name}:0,1", text, len(name))
        coeffs = parse_numbers(text, len(name) + 1)
        if name == "poly":
            return SampledFunction.polynomial(coeffs)
        return SampledFunction.from_series(PowerSeries(coeffs))
    if sep:
        raise ParseError(f"function {name!r} takes no parameters", text, len(name))
    try:
        return SampledFunction.named(name)
    except ValueError:
        raise ParseError(f"unknown function {name!r}; expected poly:, series:, exp, sin, cos or one", text, 0)


def parse_vector(text: str) -> np.ndarray:
    return np.asarray(parse_numbers(text, 0), dtype=float)


def parse_matrix(text: str) -> np.ndarray:
    """Rows separated by ``;``, entries by ``,``."""
    rows, pos = [], 0
    for row in text.split(";"):
        rows.append(parse_numbers(text[: pos + len(row)], pos, text))
        pos += len(row) + 1
    if len({len(r) for r in rows}) != 1 or len(rows) != len(rows[0]):
        raise ParseError("matrix must be square", text, 0)
    return np.asarray(rows, dtype=float)


def parse_ints(text: str) -> list[int]:
    vals = parse_numbers(text, 0)
    if any(v != int(v) for v in vals):
        raise ParseError("expected integers", text, 0)
    return [int(v) for v in vals]


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    return repr(float(v))


def write_output(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def csv_table(header: Sequence[str], columns: Sequence[np.ndarray]) -> str:
    cols = [np.atleast_1d(np.asarray(c, dtype=float)) for c in columns]
    lines = [",".join(header)]
    lines += [",".join(_fmt(c[i]) for c in cols) for i in range(cols[0].size)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args) -> int:
    weight = parse_weight(args.weight) if args.weight else None
    fn = parse_function(args.fn)
    grid = parse_grid(args.grid)
    spec = OperatorSpec(args.op, alpha=args.alpha, beta=args.beta, weight=weight, nodes=args.nodes)
    values = np.asarray(spec.evaluate(fn, grid), dtype=float)
    if args.format == "csv":
        text = csv_table(["t", "value"], [grid, values])
    else:
        text = dumps({
            "op": args.op,
            "params": {"alpha": args.alpha, "beta": args.beta, "weight": args.weight, "fn": args.fn,
                       "nodes": args.nodes},
            "grid": grid,
            "values": values,
        }) + "\n"
    write_output(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve


def _field_from_args(args, dim: int):
    """Vectorized f(t, x) with x of shape (K, d) for picard / ncf-suite."""
    if args.field == "linear":
        A = parse_matrix(args.matrix) if args.matrix else np.array([[args.lam]])
        if A.shape[0] != dim:
            raise DomainError(f"field matrix has size {A.shape[0]} but x0 has {dim} components")
        return lambda t, x: x @ A.T
    if args.field == "const":
        return lambda t, x: np.full_like(x, args.c)
    if args.field == "logistic":
        pf = PolynomialField.logistic(args.mu, args.K)
        return lambda t, x: pf(x)
    if args.field == "sir":
        pf = PolynomialField.sir(args.beta, args.gamma)
        return lambda t, x: pf(x)
    raise DomainError(f"unknown field {args.field!r}")


def _report_output(report, args, header=None) -> str:
    if args.format == "csv":
        if report.grid is None:
            raise DomainError("CSV output needs a time grid (--grid)")
        values = np.asarray(report.values, dtype=float)
        values = values.reshape(values.shape[0], -1)
        header = header or ["t"] + [f"x{i}" for i in range(values.shape[1])]
        return csv_table(header, [report.grid] + [values[:, i] for i in range(values.shape[1])])
    return report.to_json() + "\n"


def cmd_solve(args) -> int:
    grid = parse_grid(args.grid) if getattr(args, "grid", None) else None
    header = None
    if args.solver == "linear":
        w = parse_weight(args.weight)
        A = parse_matrix(args.matrix) if args.matrix else np.array([[args.lam]])
        x0 = parse_vector(args.x0)
        report = solve_linear(A, x0, w, grid if grid is not None else np.array([0.0]), N=args.n)
    elif args.solver == "poly":
        w = parse_weight(args.weight)
        if args.logistic:
            params = parse_numbers(args.logistic, 0)
            if len(params) != 2:
                raise ParseError("logistic needs exactly mu,K", args.logistic, 0)
            mu, K = params
            field = PolynomialField.logistic(mu, K)
        else:
            field = PolynomialField.scalar(parse_numbers(args.coeffs, 0))
        report = solve_polynomial(field, float(args.x0), w, N=args.n, t_grid=grid)
    elif args.solver == "sir":
        w = parse_weight(args.weight)
        p = SirParams(args.beta, args.gamma, args.s0, args.i0, args.r0)
        report = solve_sir(p, w, N=args.n, t_grid=grid)
        header = ["t", "S", "I", "R"]
    elif args.solver == "picard":
        w = parse_weight(args.weight)
        x0 = parse_vector(args.x0)
        f = _field_from_args(args, x0.size)
        cfg = PicardConfig(T_star=args.T_star, M=args.M, b=args.b, a=args.a, f_bound=args.f_bound,
                           grid_size=args.grid_size, max_iter=args.max_iter, tol=args.tol, nodes=args.nodes)
        report = solve_picard(f, x0, w, cfg)
    else:
        f = _field_from_args(args, 1)
        scalar_f = lambda t, x: f(t, np.asarray(x, dtype=float).reshape(-1, 1)).reshape(np.shape(x))  # noqa: E731
        report = ncf_equation_suite(scalar_f, args.x0_scalar, args.alpha,
                                    grid if grid is not None else np.linspace(0, 1, 11))
        if args.format == "csv":
            text = csv_table(["t", "integral", "ode"],
                             [report.grid, report.values["integral"], report.values["ode"]])
            write_output(text, args.out)
            return EXIT_OK
    write_output(_report_output(report, args, header=header), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# probe


def cmd_probe(args) -> int:
    if args.probe == "charfn":
        u = parse_vector(args.u) if args.u else np.array(DEFAULT_U_GRID)
        res = charfn_ratio_probe(charfn_case(args.case), u)
        report = res.report({"case": args.case})
    elif args.probe == "moments":
        w = parse_weight(args.weight)
        report = moments_probe(w, args.order, args.R)
    else:
        report = remark_roots_probe(args.alpha, args.beta, parse_ints(args.r), args.threshold)
    write_output(report.to_json() + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parser


def _common_output(p, formats=("json", "csv"), default="json"):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", help="write to this file instead of stdout")


def _field_args(p):
    p.add_argument("--field", choices=("linear", "const", "logistic", "sir"), default="linear")
    p.add_argument("--lambda", dest="lam", type=float, default=-1.0, help="rate for --field linear")
    p.add_argument("--matrix", help="matrix for --field linear, rows separated by ';'")
    p.add_argument("--c", type=float, default=1.0, help="value for --field const")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.3)
    p.add_argument("--gamma", type=float, default=0.1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memfrac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate an operator on a grid")
    ev.add_argument("--op", required=True, choices=sorted(OPERATOR_KINDS))
    ev.add_argument("--alpha", type=float)
    ev.add_argument("--beta", type=float)
    ev.add_argument("--weight", help="dirac | beta:a,b | expgamma:a | bemix | uniform")
    ev.add_argument("--fn", required=True, help="poly:c0,c1,... | series:c0,c1,... | exp | sin | cos | one")
    ev.add_argument("--grid", required=True, help="start:end:step")
    ev.add_argument("--nodes", type=int)
    _common_output(ev, default="csv")
    ev.set_defaults(handler=cmd_eval)

    so = sub.add_parser("solve", help="run a solver and emit a report")
    ss = so.add_subparsers(dest="solver", required=True)

    lin = ss.add_parser("linear", help="D x = A x via the Mittag-Leffler-type function")
    lin.add_argument("--lambda", dest="lam", type=float, default=-1.0)
    lin.add_argument("--matrix")
    lin.add_argument("--x0", default="1")
    lin.add_argument("--weight", default="dirac")
    lin.add_argument("--grid", default="0:1:0.1")
    lin.add_argument("--n", type=int, default=32)

    poly = ss.add_parser("poly", help="series solution of D x = Σ a_i x^i")
    group = poly.add_mutually_exclusive_group(required=True)
    group.add_argument("--coeffs", help="a0,a1,...,am")
    group.add_argument("--logistic", help="mu,K")
    poly.add_argument("--x0", type=float, default=0.5)
    poly.add_argument("--weight", default="dirac")
    poly.add_argument("--grid")
    poly.add_argument("--n", type=int, default=32)

    sir = ss.add_parser("sir", help="series solution of the SIR system")
    sir.add_argument("--beta", type=float, required=True)
    sir.add_argument("--gamma", type=float, required=True)
    sir.add_argument("--s0", type=float, default=0.99)
    sir.add_argument("--i0", type=float, default=0.01)
    sir.add_argument("--r0", type=float, default=0.0)
    sir.add_argument("--weight", default="beta:1,0.5")
    sir.add_argument("--grid")
    sir.add_argument("--n", type=int, default=32)

    pic = ss.add_parser("picard", help="fixed-point iteration x = x0 + J f(t, x)")
    _field_args(pic)
    pic.add_argument("--x0", default="1")
    pic.add_argument("--weight", default="dirac")
    pic.add_argument("--T-star", dest="T_star", type=float, required=True)
    pic.add_argument("--M", type=float, required=True, help="Lipschitz constant of f")
    pic.add_argument("--b", type=float, required=True, help="ball radius around x0")
    pic.add_argument("--a", type=float, help="time cap of the rectangle")
    pic.add_argument("--f-bound", dest="f_bound", type=float)
    pic.add_argument("--grid-size", dest="grid_size", type=int, default=513)
    pic.add_argument("--max-iter", dest="max_iter", type=int, default=200)
    pic.add_argument("--tol", type=float, default=1e-13)
    pic.add_argument("--nodes", type=int)

    ncf = ss.add_parser("ncf-suite", help="NCF integral equation vs its ODE reduction")
    _field_args(ncf)
    ncf.add_argument("--alpha", type=float, default=0.5)
    ncf.add_argument("--x0", dest="x0_scalar", type=float, default=1.0)
    ncf.add_argument("--grid", default="0:1:0.1")

    for p in (lin, poly, sir, pic, ncf):
        _common_output(p)
        p.set_defaults(handler=cmd_solve)

    pr = sub.add_parser("probe", help="necessary-condition probes for a paired V")
    ps = pr.add_subparsers(dest="probe", required=True)
    cf = ps.add_parser("charfn", help="characteristic-function ratio modulus")
    cf.add_argument("--case", default="example43", help="example43 | example42 | gamma:a | bemix-scale:s")
    cf.add_argument("--u", help="comma-separated frequencies")
    mo = ps.add_parser("moments", help="complete monotonicity of candidate V moments")
    mo.add_argument("--weight", required=True)
    mo.add_argument("--order", type=int, default=8)
    mo.add_argument("--R", type=int)
    rr = ps.add_parser("remark-roots", help="root equations for a beta-distributed V")
    rr.add_argument("--alpha", type=float, required=True)
    rr.add_argument("--beta", type=float, required=True)
    rr.add_argument("--r", default="1,2")
    rr.add_argument("--threshold", type=float, default=1e-3)
    for p in (cf, mo, rr):
        p.add_argument("--out")
        p.set_defaults(handler=cmd_probe)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except AxiomError as exc:
        print(f"axiom violated ({exc.condition}): {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DivergenceError, AccuracyError, BracketError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        diagnostics = getattr(exc, "diagnostics", None)
        if diagnostics:
            print(dumps(to_jsonable(diagnostics), indent=None), file=sys.stderr)
        return EXIT_DIVERGENCE
    except (DomainError, NoKnownPairing, ValueError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    raise SystemExit(main())
