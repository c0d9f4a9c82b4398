"""Command-line front end.

Subcommands map one-to-one onto the library: solve, closed-form, verify,
simulate, brute-force, grid, convergence.  Structured results go to JSON
(floats with 17 significant digits, so files are byte-stable and round-trip
exactly), lattice fields to CSV.  Exit codes: 0 success, 2 parse failure,
3 numerical non-convergence (the report is still written), 4 invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from . import closed_form, comparison, continuum, graphs, play, solver
from .errors import (
    EstimateUndefinedError,
    PreconditionError,
    StarReductionError,
    ValidationError,
)

DEFAULT_SEED = 20177  # fixed so reruns are reproducible unless --seed is given

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NO_CONVERGENCE = 3
EXIT_INVARIANT = 4


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message


def _format_json(obj, indent: int = 0) -> str:
    """JSON text with every float at 17 significant digits."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {_format_json(v, indent + 1)}'
            for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(f"{pad}  {_format_json(v, indent + 1)}" for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if np.isnan(x):
            return '"nan"'
        if np.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    return json.dumps(obj)


def _write_json(path: str, obj) -> None:
    text = _format_json(obj) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_json(path: str, what: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise _CliError(EXIT_PARSE, f"cannot read {what} file {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise _CliError(
            EXIT_PARSE,
            f"{what} file {path}: line {exc.lineno} column {exc.colno}: {exc.msg}",
        )


def _load_spec(path: str) -> graphs.GameSpec:
    obj = _read_json(path, "graph")
    try:
        spec = graphs.spec_from_json(obj)
    except graphs.SchemaError as exc:
        raise _CliError(EXIT_PARSE, f"graph file {path}: {exc}")
    violations = graphs.validate(spec)
    if violations:
        raise _CliError(EXIT_INVARIANT, f"graph file {path}: " + "; ".join(violations))
    return spec


def _load_values(path: str, spec: graphs.GameSpec) -> np.ndarray:
    obj = _read_json(path, "values")
    vals = obj.get("values") if isinstance(obj, dict) else obj
    if not isinstance(vals, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in vals
    ):
        raise _CliError(EXIT_PARSE, f"values file {path}: key 'values' must be a numeric array")
    if len(vals) != spec.graph.num_nodes:
        raise _CliError(
            EXIT_PARSE,
            f"values file {path}: expected {spec.graph.num_nodes} entries, got {len(vals)}",
        )
    return np.asarray(vals, dtype=np.float64)


def _load_strategy(path: str, spec: graphs.GameSpec) -> play.StrategyPair:
    obj = _read_json(path, "strategy")
    if not isinstance(obj, dict) or "player1" not in obj or "player2" not in obj:
        raise _CliError(EXIT_PARSE, f"strategy file {path}: needs keys 'player1' and 'player2'")
    p1: dict[int, int | None] = {}
    p2: dict[int, int] = {}
    try:
        for rec in obj["player1"]:
            node = int(rec["node"])
            if rec["action"] == "let":
                p1[node] = None
            elif rec["action"] == "pull":
                p1[node] = int(rec["target"])
            else:
                raise _CliError(
                    EXIT_PARSE,
                    f"strategy file {path}: key 'action' must be 'let' or 'pull'",
                )
        for rec in obj["player2"]:
            p2[int(rec["node"])] = int(rec["target"])
    except (KeyError, TypeError) as exc:
        raise _CliError(EXIT_PARSE, f"strategy file {path}: malformed record ({exc})")
    try:
        return play.StrategyPair.from_actions(spec, p1, p2)
    except ValidationError as exc:
        raise _CliError(EXIT_INVARIANT, f"strategy file {path}: {exc}")


def _cmd_solve(args) -> int:
    spec = _load_spec(args.graph)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        report = solver.solve(spec, tol=args.tol, max_iter=args.max_iter)
    _write_json(
        args.output,
        {
            "values": list(report.values),
            "iterations": report.iterations,
            "max_residual": report.max_residual,
            "converged": report.converged,
        },
    )
    return EXIT_OK if report.converged else EXIT_NO_CONVERGENCE


def _cmd_closed_form(args) -> int:
    star_flags = args.arms is not None or args.payoffs is not None
    if star_flags:
        if args.arms is None or args.payoffs is None:
            raise _CliError(EXIT_PARSE, "star mode needs both --arms and --payoffs")
        try:
            arms = [int(x) for x in args.arms.split(",")]
            payoffs = [float(x) for x in args.payoffs.split(",")]
        except ValueError as exc:
            raise _CliError(EXIT_PARSE, f"bad --arms/--payoffs: {exc}")
        try:
            spec = graphs.build_star(arms, payoffs, args.eps)
            values, pair = closed_form.star_value(spec)
        except ValueError as exc:
            raise _CliError(EXIT_INVARIANT, str(exc))
        except StarReductionError as exc:
            raise _CliError(EXIT_NO_CONVERGENCE, str(exc))
        _write_json(
            args.output,
            {"values": list(values), "hub_pair": list(pair)},
        )
        return EXIT_OK
    if args.n is None or args.f0 is None or args.f1 is None:
        raise _CliError(EXIT_PARSE, "segment mode needs --n, --f0 and --f1")
    try:
        spec = graphs.build_segment(args.n, args.f0, args.f1, args.eps)
    except ValueError as exc:
        raise _CliError(EXIT_INVARIANT, str(exc))
    sol = closed_form.segment_value(spec)
    _write_json(
        args.output,
        {
            "case": sol.case_label,
            "q": sol.q,
            "k": sol.k,
            "family_j_range": list(sol.family_j_range) if sol.family_j_range else None,
            "mirrored": sol.mirrored,
            "values": list(sol.values),
        },
    )
    return EXIT_OK


def _cmd_verify(args) -> int:
    spec = _load_spec(args.graph)
    u = _load_values(args.values, spec)
    cls = comparison.classify(spec, u, tol=args.tol)
    _write_json(
        args.output,
        {
            "kind": cls.kind,
            "interior_nodes": list(cls.interior),
            "residuals": list(cls.residuals),
        },
    )
    return EXIT_OK


def _cmd_simulate(args) -> int:
    spec = _load_spec(args.graph)
    pair = _load_strategy(args.strategy, spec)
    if spec.graph.is_terminal(args.start):
        raise _CliError(EXIT_INVARIANT, f"start node {args.start} is terminal")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            est = play.estimate(
                spec, pair, args.start, args.episodes, args.seed, args.max_steps
            )
    except EstimateUndefinedError as exc:
        _write_json(
            args.output,
            {
                "mean": None,
                "std_error": None,
                "episodes": args.episodes,
                "truncated_fraction": exc.truncated_fraction,
            },
        )
        return EXIT_NO_CONVERGENCE
    _write_json(
        args.output,
        {
            "mean": est.mean,
            "std_error": est.std_error,
            "episodes": est.episodes,
            "truncated_fraction": est.truncated_fraction,
        },
    )
    return EXIT_OK


def _cmd_brute_force(args) -> int:
    spec = _load_spec(args.graph)
    try:
        maximin, minimax = play.stationary_values(spec, max_interior=args.max_interior)
    except ValueError as exc:
        raise _CliError(EXIT_INVARIANT, str(exc))
    _write_json(
        args.output,
        {"values": list(maximin), "maximin": list(maximin), "minimax": list(minimax)},
    )
    return EXIT_OK


def _parse_boundary(args, dim: int):
    if args.boundary_csv is not None:
        rows = []
        try:
            with open(args.boundary_csv) as fh:
                for line in fh:
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    parts = [float(x) for x in line.split(",")]
                    if len(parts) != dim + 1:
                        raise ValueError(f"need {dim + 1} columns, got {len(parts)}")
                    rows.append(parts)
        except (OSError, ValueError) as exc:
            raise _CliError(EXIT_PARSE, f"boundary csv {args.boundary_csv}: {exc}")
        if not rows:
            raise _CliError(EXIT_PARSE, f"boundary csv {args.boundary_csv}: no samples")
        table = np.asarray(rows)

        def nearest(point):
            q = np.atleast_1d(np.asarray(point, dtype=np.float64))
            d2 = ((table[:, :dim] - q[None, :]) ** 2).sum(axis=1)
            return float(table[int(np.argmin(d2)), dim])

        return nearest
    try:
        consts = tuple(float(x) for x in args.boundary.split(","))
    except ValueError as exc:
        raise _CliError(EXIT_PARSE, f"bad --boundary: {exc}")
    if len(consts) == 1:
        return consts[0]
    return consts


def _grid_problem(args) -> continuum.GridProblem:
    try:
        lengths = tuple(float(x) for x in args.domain.split(","))
    except ValueError as exc:
        raise _CliError(EXIT_PARSE, f"bad --domain: {exc}")
    boundary = _parse_boundary(args, len(lengths))
    try:
        return continuum.GridProblem(
            lengths, args.h, args.eps, getattr(args, "lam"), boundary, args.variant
        )
    except ValueError as exc:
        raise _CliError(EXIT_INVARIANT, str(exc))


def _cmd_grid(args) -> int:
    problem = _grid_problem(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sol, report = continuum.grid_solve(problem, tol=args.tol, max_iter=args.max_iter)
    coords = sol.coords
    with open(args.output_csv, "w") as fh:
        if problem.dim == 1:
            fh.write("x,value\n")
            for x, v in zip(coords, sol.values):
                fh.write(f"{format(float(x), '.17g')},{format(float(v), '.17g')}\n")
        else:
            fh.write("x,y,value\n")
            for (x, y), v in zip(coords, sol.values):
                fh.write(
                    f"{format(float(x), '.17g')},{format(float(y), '.17g')},"
                    f"{format(float(v), '.17g')}\n"
                )
    rep: dict = {
        "iterations": report.iterations,
        "max_residual": report.max_residual,
        "converged": report.converged,
    }
    if problem.dim == 1 and problem.variant == "min":
        ref = continuum.analytic_1d(
            problem.boundary_value(0.0),
            problem.boundary_value(problem.lengths[0]),
            problem.lam,
            problem.lengths[0],
        )
        rep["error_vs_reference"] = float(np.max(np.abs(sol.values - ref(coords))))
    _write_json(args.output, rep)
    return EXIT_OK if report.converged else EXIT_NO_CONVERGENCE


def _cmd_convergence(args) -> int:
    try:
        lengths = tuple(float(x) for x in args.domain.split(","))
        eps_list = [float(x) for x in args.eps_list.split(",")]
    except ValueError as exc:
        raise _CliError(EXIT_PARSE, f"bad --domain/--eps-list: {exc}")
    boundary = _parse_boundary(args, len(lengths))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rows = continuum.convergence_study(
                lengths,
                boundary,
                getattr(args, "lam"),
                eps_list,
                variant=args.variant,
                h_ratio=args.h_ratio,
                tol=args.tol,
                max_iter=args.max_iter,
            )
    except ValueError as exc:
        raise _CliError(EXIT_INVARIANT, str(exc))
    _write_json(
        args.output,
        {
            "eps": [r.eps for r in rows],
            "h": [r.h for r in rows],
            "errors": [r.error for r in rows],
            "orders": [r.order for r in rows],
            "iterations": [r.iterations for r in rows],
            "converged": [r.converged for r in rows],
        },
    )
    return EXIT_OK if all(r.converged for r in rows) else EXIT_NO_CONVERGENCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tugofwar",
        description="Solve, verify and simulate forced-move tug-of-war games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def out_flag(p, default="-"):
        p.add_argument("--output", "-o", default=default, help="output JSON path ('-' = stdout)")

    p = sub.add_parser("solve", help="solve the fixed-point equation on a graph")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--tol", type=float, default=1e-10, help="sweep-change stop tolerance")
    p.add_argument("--max-iter", type=int, default=10**6, help="sweep budget")
    out_flag(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("closed-form", help="closed-form value of a segment or star")
    p.add_argument("--n", type=int, help="segment interior node count")
    p.add_argument("--f0", type=float, help="payoff at node 0")
    p.add_argument("--f1", type=float, help="payoff at node n+1")
    p.add_argument("--arms", help="star arm lengths, e.g. 2,2,3")
    p.add_argument("--payoffs", help="star arm payoffs, e.g. 0,1,-2")
    p.add_argument("--eps", type=float, required=True, help="forced-move payment")
    out_flag(p)
    p.set_defaults(func=_cmd_closed_form)

    p = sub.add_parser("verify", help="classify candidate values against the equation")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--values", required=True, help="values JSON file (array or {'values': [...]})")
    p.add_argument("--tol", type=float, default=1e-10, help="classification tolerance")
    out_flag(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo estimate under a strategy pair")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--strategy", required=True, help="strategy JSON file")
    p.add_argument("--start", type=int, required=True, help="interior start node")
    p.add_argument("--episodes", type=int, default=10000, help="episode count")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed")
    p.add_argument("--max-steps", type=int, default=10000, help="per-episode step cap")
    out_flag(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("brute-force", help="exhaustive stationary maximin value")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--max-interior", type=int, default=6, help="interior-node cap")
    out_flag(p)
    p.set_defaults(func=_cmd_brute_force)

    def grid_flags(p):
        p.add_argument("--domain", required=True, help="extents: L or LX,LY")
        p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="fee rate")
        p.add_argument("--variant", choices=["min", "max"], default="min")
        p.add_argument(
            "--boundary",
            default="0",
            help="constant payoff, or per-end (1D: l,r) / per-side (2D: x0,x1,y0,y1)",
        )
        p.add_argument(
            "--boundary-csv",
            help="CSV of boundary samples (x[,y],value); nearest sample wins",
        )
        p.add_argument("--tol", type=float, default=1e-10, help="sweep-change stop tolerance")
        p.add_argument("--max-iter", type=int, default=10**5, help="sweep budget")

    p = sub.add_parser("grid", help="solve the eps-ball game on a lattice")
    grid_flags(p)
    p.add_argument("--eps", type=float, required=True, help="ball radius")
    p.add_argument("--h", type=float, required=True, help="lattice spacing (<= eps/10)")
    p.add_argument("--output-csv", required=True, help="lattice field CSV path")
    out_flag(p)
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("convergence", help="error table over a decreasing eps list")
    grid_flags(p)
    p.add_argument("--eps-list", required=True, help="decreasing eps values, e.g. 0.2,0.1,0.05")
    p.add_argument("--h-ratio", type=float, default=0.1, help="h = h_ratio * eps")
    out_flag(p)
    p.set_defaults(func=_cmd_convergence)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.code
    except (ValidationError, PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
