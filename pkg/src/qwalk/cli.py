"""Command-line front end.

Tabular numbers go out as CSV (17 significant digits, LF endings) so two
runs on the same input are byte-identical; structured results go out as
JSON.  Exit codes: 0 success / all checks pass, 1 a verification check or
computation failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .engine import (
    TruncationError,
    build_step_operator,
    run_measured_walk,
    run_walk,
    unitarity_defect,
)
from .graph import (
    CoinValidationError,
    EqualTransmission,
    Graph,
    GraphValidationError,
    TailConfig,
    graph_hash,
    load_graph,
    make_coin,
    parse_edge_state,
    validate_coin_constraints,
)
from .oracle import path_sum
from .random_graphs import random_graph
from .scattering import (
    PoleProximityError,
    ScatteringSingularError,
    converged_transmission_series,
    left_right_defect,
    p_out_series,
    p_out_spectral,
    scan_circle,
    transmission_series,
)
from .spectral import bound_state_orthogonality, check_time_reversal, find_bound_states


class InputError(Exception):
    """Bad input file, flag value, or graph; maps to exit code 2."""


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def _table_json(header: list[str], rows: list[list]) -> str:
    payload = [dict(zip(header, (float(x) for x in row))) for row in rows]
    return json.dumps(payload, indent=2) + "\n"


def _emit_table(args, header: list[str], rows: list[list]) -> None:
    fmt = getattr(args, "format", "csv")
    text = _csv(header, rows) if fmt == "csv" else _table_json(header, rows)
    _emit(text, args.output)


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _load(args) -> Graph:
    if args.graph is None:
        raise InputError("a graph is required; pass --graph FILE (or --graph random with --seed)")
    if args.graph == "random":
        rng = np.random.default_rng(args.seed)
        return random_graph(rng)
    try:
        return load_graph(args.graph)
    except FileNotFoundError:
        raise InputError(f"graph file not found: {args.graph}") from None
    except GraphValidationError as exc:
        where = f" (at {exc.field})" if exc.field else ""
        raise InputError(f"invalid graph {args.graph}{where}: {exc}") from exc


def cmd_simulate(args, argv) -> int:
    graph = _load(args)
    op = build_step_operator(graph, TailConfig(args.steps + 1))
    initial = (
        op.basis.entry_start_state()
        if args.initial is None
        else parse_edge_state(graph, args.initial)
    )
    if args.measured:
        record = run_measured_walk(op, initial, args.steps)
        cum = record.cumulative
        rows = [[n, record.q[n], cum[n]] for n in range(1, args.steps + 1)]
        _emit_table(args, ["n", "q", "cumulative"], rows)
    else:
        monitor = op.basis.index(op.basis.exit_monitor_state())
        psi = op.basis.basis_vector(initial)
        rows = []
        for n in range(1, args.steps + 1):
            psi = op.apply(psi)
            rows.append([n, abs(psi[monitor]) ** 2, float(np.linalg.norm(psi))])
        _emit_table(args, ["n", "p_exit", "norm"], rows)
    return 0


def cmd_scatter(args, argv) -> int:
    graph = _load(args)
    thetas, ts, rs = scan_circle(graph, args.samples, rho=args.radius, direction=args.direction)
    rows = [
        [th, t.real, t.imag, abs(t) ** 2, r.real, r.imag]
        for th, t, r in zip(thetas, ts, rs)
    ]
    _emit_table(args, ["theta", "re_t", "im_t", "t2", "re_r", "im_r"], rows)
    return 0


def cmd_qseries(args, argv) -> int:
    graph = _load(args)
    series = transmission_series(graph, args.n_max, rho=args.radius, samples=args.samples)
    q = series.q()
    cum = np.cumsum(q)
    rows = [[n, q[n], cum[n]] for n in range(1, args.n_max + 1)]
    _emit_table(args, ["n", "q", "cumulative"], rows)
    return 0


def cmd_pout(args, argv) -> int:
    graph = _load(args)
    series = transmission_series(graph, args.n_max)
    summed = p_out_series(series)
    spectral = p_out_spectral(graph, args.samples)
    payload = {
        "p_out_spectral": spectral,
        "p_out_series": summed,
        "discrepancy": abs(spectral - summed),
        "series_tail_estimate": series.tail_estimate,
        "n_max": args.n_max,
        "samples": args.samples,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def cmd_bound_states(args, argv) -> int:
    graph = _load(args)
    bound = find_bound_states(graph)
    payload = {
        "count": len(bound),
        "bound_states": [
            {
                "eigenvalue": _pair(b.eigenvalue),
                "support": {str(s): _pair(a) for s, a in zip(b.states, b.vector)},
            }
            for b in bound
        ],
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def cmd_time_reversal(args, argv) -> int:
    graph = _load(args)
    holds, residual = check_time_reversal(graph)
    _emit(json.dumps({"holds": holds, "residual": residual}, indent=2) + "\n", args.output)
    return 0


def cmd_oracle(args, argv) -> int:
    graph = _load(args)
    try:
        initial = parse_edge_state(graph, getattr(args, "from"))
        target = parse_edge_state(graph, args.to)
        result = path_sum(graph, initial, target, args.steps)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    payload = {
        "amplitude": _pair(result.amplitude),
        "path_count": result.path_count,
        "steps": result.n,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def cmd_emit_plotdata(args, argv) -> int:
    graph = _load(args)
    if args.quantity == "qseries":
        series = transmission_series(graph, args.n_max)
        q = series.q()
        text = _csv(["n", "q"], [[n, q[n]] for n in range(1, args.n_max + 1)])
    elif args.quantity == "transmission":
        thetas, ts, _ = scan_circle(graph, args.samples)
        text = _csv(["theta", "t2"], [[th, abs(t) ** 2] for th, t in zip(thetas, ts)])
    elif args.quantity == "spectrum":
        bound = find_bound_states(graph)
        text = _csv(
            ["re_lambda", "im_lambda"],
            [[b.eigenvalue.real, b.eigenvalue.imag] for b in bound],
        )
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown quantity {args.quantity!r}")
    _emit(text, args.output)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _coin_check(graph: Graph) -> dict:
    check = {"name": "coin_unitarity", "status": "pass", "residual": 0.0, "tolerance": 1e-12}
    worst = 0.0
    for v in graph.vertices:
        spec = graph.coin_spec(v)
        dim = graph.coin_dimension(v)
        if isinstance(spec, EqualTransmission) and dim >= 2:
            r1, r2 = validate_coin_constraints(spec.r, spec.t, dim)
            if max(abs(r1), abs(r2)) > 1e-12:
                check.update(status="fail", residual=r1, residual2=r2, vertex=v)
                return check
            worst = max(worst, abs(r1), abs(r2))
        else:
            try:
                coin = make_coin(spec, dim)
            except CoinValidationError as exc:
                bad = float(exc.residuals[0]) if exc.residuals else float("inf")
                check.update(status="fail", residual=bad, vertex=v, message=str(exc))
                return check
            defect = float(np.max(np.abs(coin.conj().T @ coin - np.eye(dim))))
            worst = max(worst, defect)
    check["residual"] = worst
    return check


def _run_verification(graph: Graph) -> tuple[list[dict], dict]:
    checks = [_coin_check(graph)]
    quantities: dict = {}
    names = [
        "step_unitarity",
        "first_arrival_vs_series",
        "pout_route_agreement",
        "flux_conservation",
        "bound_state_residuals",
        "bound_state_orthogonality",
        "time_reversal_lr",
    ]
    if checks[0]["status"] == "fail":
        checks.extend({"name": n, "status": "skipped"} for n in names)
        return checks, quantities

    def add(name, residual, tolerance, **extra):
        entry = {
            "name": name,
            "status": "pass" if residual <= tolerance else "fail",
            "residual": float(residual),
            "tolerance": tolerance,
        }
        entry.update(extra)
        checks.append(entry)

    op = build_step_operator(graph, TailConfig(41))
    add("step_unitarity", unitarity_defect(op), 1e-12)

    record = run_measured_walk(op, op.basis.entry_start_state(), 40)
    series = converged_transmission_series(graph, 63)
    q_series = series.q()
    add(
        "first_arrival_vs_series",
        float(np.max(np.abs(record.q[: 41] - q_series[: 41]))),
        1e-8,
    )
    quantities["q"] = [float(x) for x in record.q[:11]]

    summed = p_out_series(series)
    spectral = p_out_spectral(graph)
    converged = series.tail_estimate <= 1e-10
    checks.append(
        {
            "name": "pout_route_agreement",
            "status": "pass" if (not converged) or abs(spectral - summed) <= 1e-6 else "fail",
            "residual": abs(spectral - summed),
            "tolerance": 1e-6,
            "series_converged": converged,
            "series_tail_estimate": series.tail_estimate,
        }
    )
    quantities["p_out_spectral"] = spectral
    quantities["p_out_series"] = summed

    _, ts, rs = scan_circle(graph, 64)
    add(
        "flux_conservation",
        float(np.max(np.abs(np.abs(ts) ** 2 + np.abs(rs) ** 2 - 1.0))),
        1e-10,
    )

    bound = find_bound_states(graph)
    add(
        "bound_state_residuals",
        max((b.residual for b in bound), default=0.0),
        1e-10,
        count=len(bound),
    )
    add("bound_state_orthogonality", bound_state_orthogonality(graph, 50), 1e-10)

    holds, t_residual = check_time_reversal(graph)
    lr = left_right_defect(graph, 64)
    checks.append(
        {
            "name": "time_reversal_lr",
            "status": "pass" if (not holds) or lr <= 1e-10 else "fail",
            "residual": lr,
            "tolerance": 1e-10,
            "time_reversal_holds": holds,
            "time_reversal_residual": t_residual,
        }
    )
    return checks, quantities


def cmd_verify(args, argv) -> int:
    graph = _load(args)
    checks, quantities = _run_verification(graph)
    report = {
        "command": ["verify"] + [a for a in argv if a != "verify"],
        "graph_hash": graph_hash(graph),
        "checks": checks,
        "quantities": quantities,
        "output": args.output,
    }
    _emit(json.dumps(report, indent=2) + "\n", args.output)
    for c in checks:
        line = f"{c['status']:7s} {c['name']}"
        if "residual" in c:
            line += f"  residual={c['residual']:.3e}"
        print(line, file=sys.stderr)
    return 0 if all(c["status"] == "pass" for c in checks) else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalk",
        description="Quantum walks on graphs with two tails: simulation, "
        "scattering amplitudes, first-arrival series, bound states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="graph JSON file, or 'random' with --seed")
    common.add_argument("--seed", type=int, default=0, help="seed for --graph random")
    common.add_argument("--output", help="write to this file instead of stdout")

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("simulate", parents=[common, fmt], help="run the walk")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--measured", action="store_true", help="monitor the exit edge each step")
    p.add_argument("--initial", help="initial edge state, e.g. 'in1>0'")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scatter", parents=[common, fmt], help="transmission/reflection sweep")
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--direction", choices=["left", "right"], default="left")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("qseries", parents=[common, fmt], help="first-arrival series from t(z)")
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--radius", type=float, default=1.0)
    p.set_defaults(func=cmd_qseries)

    p = sub.add_parser("pout", parents=[common], help="total transmission, both routes")
    p.add_argument("--samples", type=int, default=1024)
    p.add_argument("--n-max", type=int, default=63)
    p.set_defaults(func=cmd_pout)

    p = sub.add_parser("bound-states", parents=[common], help="bound states of the walk")
    p.set_defaults(func=cmd_bound_states)

    p = sub.add_parser("time-reversal", parents=[common], help="time-reversal invariance check")
    p.set_defaults(func=cmd_time_reversal)

    p = sub.add_parser("oracle", parents=[common], help="brute-force path-sum amplitude")
    p.add_argument("--from", required=True, help="initial edge state, e.g. 'in1>0'")
    p.add_argument("--to", required=True, help="target edge state, e.g. '2>out1'")
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", parents=[common], help="run every cross-check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("emit-plotdata", parents=[common], help="plot-ready CSV")
    p.add_argument("--quantity", choices=["qseries", "spectrum", "transmission"], required=True)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--samples", type=int, default=64)
    p.set_defaults(func=cmd_emit_plotdata)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the usage message
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GraphValidationError, CoinValidationError) as exc:
        where = getattr(exc, "field", None)
        at = f" (at {where})" if where else ""
        print(f"error{at}: {exc}", file=sys.stderr)
        return 2
    except (TruncationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ScatteringSingularError, PoleProximityError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:  # pragma: no cover - thin wrapper
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    entrypoint()
