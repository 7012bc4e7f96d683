"""Command-line front end.

Verbs: ``rabi``, ``coupling``, ``scan``, ``vsh-grid``, ``optimize`` run
scenario requests and emit tables; ``verify`` runs the built-in fidelity
suite (closed-form rotation matrices, explicit harmonic tables, the
polarization table, and the tensor contraction identity) and prints one
pass/fail line per check.

Exit codes: 0 success, 1 self-check failure, 2 scenario/parse error,
3 numerical non-convergence, 4 infeasible optimization.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .beams import ConvergenceError
from .scenario import (
    InfeasibleError,
    OutputRequest,
    Scenario,
    ScenarioError,
    emit,
    parse_scenario,
    run_scenario,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_NONCONVERGED = 3
EXIT_INFEASIBLE = 4


def _add_common(parser: argparse.ArgumentParser, scenario_required: bool = True):
    parser.add_argument("--scenario", required=scenario_required, help="scenario TOML file")
    parser.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--tolerance", type=float, default=1e-9, help="beam quadrature tolerance")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for scans")
    parser.add_argument(
        "--reproject-polarization",
        action="store_true",
        help="re-project the polarization transverse to each Fourier component",
    )
    parser.add_argument(
        "--plot",
        action="store_true",
        help="render figures next to the output file (grid and scan requests)",
    )


def _load_scenario(path: str) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    return parse_scenario(text)


def _filter_outputs(scenario: Scenario, kinds: tuple[str, ...], default: OutputRequest | None) -> Scenario:
    wanted = tuple(o for o in scenario.outputs if o.kind in kinds)
    if not wanted:
        if default is None:
            raise ScenarioError("outputs", f"scenario has no output of kind {kinds}")
        wanted = (default,)
    return Scenario(
        transition=scenario.transition,
        drives=scenario.drives,
        outputs=wanted,
        raw=scenario.raw,
    )


def _write(table, args) -> None:
    payload = emit(table, args.format)
    if args.out:
        Path(args.out).write_bytes(payload)
        if args.plot:
            from .plotting import render_figures

            stem = str(Path(args.out).with_suffix(""))
            for path in render_figures(table, stem):
                print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.buffer.write(payload)


def _run_verb(args, kinds: tuple[str, ...], default_kind: str | None) -> int:
    scenario = _load_scenario(args.scenario)
    default = OutputRequest(kind=default_kind) if default_kind else None
    scenario = _filter_outputs(scenario, kinds, default)
    table = run_scenario(
        scenario,
        tol=args.tolerance,
        reproject=args.reproject_polarization,
        threads=args.threads,
    )
    _write(table, args)
    return EXIT_OK


def _cmd_rabi(args) -> int:
    return _run_verb(args, ("rabi",), "rabi")


def _cmd_coupling(args) -> int:
    return _run_verb(args, ("coupling", "selectivity"), "coupling")


def _cmd_scan(args) -> int:
    return _run_verb(args, ("scan",), None)


def _cmd_vsh_grid(args) -> int:
    if args.scenario:
        scenario = _load_scenario(args.scenario)
        scenario = _filter_outputs(scenario, ("vsh_grid",), None)
    else:
        if args.K is None or args.p is None:
            raise ScenarioError("vsh-grid", "give --scenario or --K and --p")
        request = OutputRequest(
            kind="vsh_grid",
            K=args.K,
            p=args.p,
            lambda_type=args.lambda_type,
            n_theta=args.n_theta,
            n_phi=args.n_phi,
        )
        scenario = Scenario(transition=None, drives=(), outputs=(request,), raw={})
    table = run_scenario(scenario, tol=args.tolerance, threads=args.threads)
    _write(table, args)
    return EXIT_OK


def _cmd_optimize(args) -> int:
    scenario = _load_scenario(args.scenario)
    default = OutputRequest(kind="optimize", objective=args.objective)
    scenario = _filter_outputs(scenario, ("optimize",), default)
    table = run_scenario(scenario, tol=args.tolerance, threads=args.threads)
    _write(table, args)
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import run_verification

    results = run_verification()
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {name}"
        if detail and not ok:
            line += f"  ({detail})"
        print(line)
    failed = sum(1 for _, ok, _ in results if not ok)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rabigeom",
        description="Angular geometry and Rabi frequencies of laser-driven multipole transitions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rabi", help="resonant Rabi frequency for the scenario drives")
    _add_common(p)
    p.set_defaults(func=_cmd_rabi)

    p = sub.add_parser("coupling", help="geometric coupling amplitudes (and selectivity requests)")
    _add_common(p)
    p.set_defaults(func=_cmd_coupling)

    p = sub.add_parser("scan", help="run the scenario's parameter scans")
    _add_common(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("vsh-grid", help="sample a vector harmonic on a sphere grid")
    _add_common(p, scenario_required=False)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--lambda-type", type=int, choices=(0, 1), default=1)
    p.add_argument("--n-theta", type=int, default=91)
    p.add_argument("--n-phi", type=int, default=180)
    p.set_defaults(func=_cmd_vsh_grid)

    p = sub.add_parser("optimize", help="optimal (direction, polarization) for a projection channel")
    _add_common(p)
    p.add_argument(
        "--objective",
        choices=("max_coupling", "max_coupling_zero_selectivity"),
        default="max_coupling",
    )
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("verify", help="run the built-in fidelity checks")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
