"""Batch front door: ddmlab <command> --spec FILE [options].

Commands take their payload from the spec file's ``commands`` section, so a
run is reproducible from the file alone; flags only select the command, the
output format, the seed, and display options.  Exit codes: 0 ok, 1 fail
verdict, 2 input error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import engine, examples, measures, suites
from .budgeted import BudgetedProblem, psi_budgeted, psi_chain, psi_eps_grid, psi_signed
from .covers import TruncationConfig
from .errors import (
    BudgetExceededError,
    DimensionCapError,
    InfeasibleError,
    LabError,
    TooLargeError,
)
from .specfile import (
    ProblemSpec,
    decimal_string,
    format_rational,
    load_spec,
    parse_rational,
    witness_payload,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


def default_spec() -> ProblemSpec:
    """Built-in problem set: both reference instances."""
    from .specfile import parse_spec

    return parse_spec(
        {
            "alphabet": 2,
            "measures": {
                "point": {"kind": "dirac", "period": [0, 1]},
                "chain": {
                    "kind": "markov",
                    "pi": ["1/3", "2/3"],
                    "A": [["1/2", "1/2"], ["1/4", "3/4"]],
                },
                "uniform_chain": {
                    "kind": "markov",
                    "pi": ["1/2", "1/2"],
                    "A": [["1/2", "1/2"], ["1/4", "3/4"]],
                },
                "avg2": {"kind": "cesaro", "base": "point", "n": 2},
            },
            "sets": {"all": "full", "none": "empty", "zero": "cyl(0,[0])"},
            "configs": {"default": {"depth": 1, "width": 0, "base_shift": 0}},
            "commands": {
                "eval": {"measure": "chain", "set": "zero"},
                "phi": {
                    "measure": "point",
                    "set": "all",
                    "depths": [1, 2],
                    "widths": [0],
                    "shifts": [0, -1],
                },
                "psi": {
                    "objective": "avg2",
                    "phi": "point",
                    "set": "all",
                    "eps": ["1", "1/2", "1/4"],
                    "shifts": [0, -1],
                    "config": "default",
                },
                "chain": {
                    "phi": "chain",
                    "objectives": ["avg2"],
                    "eps": "1/2",
                    "set": "zero",
                    "config": "default",
                },
                "example": {"name": "e1"},
                "verify": {"suite": "all"},
            },
        }
    )


def _maybe_decimal(payload: dict, value: Fraction, digits: int | None):
    if digits is not None:
        payload["decimal"] = decimal_string(value, digits)


def cmd_eval(spec: ProblemSpec, payload: dict, args) -> tuple[dict, int]:
    mu = spec.measure(payload["measure"])
    s = spec.window_set(payload["set"])
    value = measures.eval0(mu, s)
    out = {
        "command": "eval",
        "measure": payload["measure"],
        "set": payload["set"],
        "value": format_rational(value),
    }
    _maybe_decimal(out, value, args.decimal)
    return out, EXIT_OK


def cmd_phi(spec: ProblemSpec, payload: dict, args) -> tuple[dict, int]:
    mu = spec.measure(payload["measure"])
    q = spec.window_set(payload["set"])
    depths = [int(d) for d in payload.get("depths", [1])]
    widths = [int(w) for w in payload.get("widths", [0])]
    shifts = [int(i) for i in payload.get("shifts", [0])]
    base_graded = bool(payload.get("base_graded", False))
    solver = engine.phi_paren_truncated if base_graded else engine.phi_truncated
    rows = []
    for d in depths:
        for w in widths:
            for i in shifts:
                cert = solver(q, mu, TruncationConfig(d, w, i))
                row = {
                    "D": d,
                    "W": w,
                    "i": i,
                    "value": format_rational(cert.value),
                }
                _maybe_decimal(row, cert.value, args.decimal)
                if args.witness:
                    row["witness"] = witness_payload(cert.witness)
                rows.append(row)
    return {"command": "phi", "base_graded": base_graded, "rows": rows}, EXIT_OK


def cmd_psi(spec: ProblemSpec, payload: dict, args) -> tuple[dict, int]:
    psi = spec.measure(payload["objective"])
    q = spec.window_set(payload["set"])
    cfg = spec.config(payload.get("config", {"depth": 1}))
    if "constraints" in payload:
        # explicit strict bounds instead of the slack-by-shift grid
        constraints = tuple(
            (spec.measure(c["measure"]), parse_rational(c["bound"]))
            for c in payload["constraints"]
        )
        cert = psi_budgeted(BudgetedProblem(q, psi, constraints, cfg))
        out = {"command": "psi", "value": format_rational(cert.value)}
        _maybe_decimal(out, cert.value, args.decimal)
        if args.witness:
            out["witness"] = witness_payload(cert.witness)
        return out, EXIT_OK
    phi = spec.measure(payload["phi"])
    eps_list = [parse_rational(e) for e in payload["eps"]]
    shifts = [int(i) for i in payload.get("shifts", [0])]
    grid = psi_eps_grid(q, psi, phi, eps_list, shifts, cfg)
    rows = []
    for eps in grid.eps_list:
        for i in grid.i_list:
            cert = grid.cells[(eps, i)]
            row = {"eps": format_rational(eps), "i": i}
            if cert is None:
                row["value"] = "infeasible"
            else:
                row["value"] = format_rational(cert.value)
                _maybe_decimal(row, cert.value, args.decimal)
                if args.witness:
                    row["witness"] = witness_payload(cert.witness)
            rows.append(row)
    out = {
        "command": "psi",
        "phi_surrogate": format_rational(grid.phi_surrogate),
        "monotone_in_slack": grid.nondecreasing_as_eps_shrinks,
        "monotone_in_shift": grid.nondecreasing_as_i_decreases,
        "rows": rows,
    }
    return out, EXIT_OK


def cmd_chain(spec: ProblemSpec, payload: dict, args) -> tuple[dict, int]:
    phi = spec.measure(payload["phi"])
    q = spec.window_set(payload["set"])
    cfg = spec.config(payload.get("config", {"depth": 1}))
    eps = parse_rational(payload.get("eps", "1/2"))
    objectives = [spec.measure(name) for name in payload["objectives"]]
    scales = payload.get("c")
    if scales is None:
        certs = psi_chain(q, phi, objectives, eps, cfg)
    else:
        certs = psi_signed(q, phi, objectives, [parse_rational(c) for c in scales], eps, cfg)
    rows = []
    for level, cert in enumerate(certs, start=1):
        row = {"level": level, "value": format_rational(cert.value)}
        _maybe_decimal(row, cert.value, args.decimal)
        if args.witness:
            row["witness"] = witness_payload(cert.witness)
        rows.append(row)
    return {"command": "chain", "eps": format_rational(eps), "rows": rows}, EXIT_OK


def _report_payload(reports) -> tuple[dict, int]:
    checks = []
    counts = {"PASS": 0, "FAIL": 0, "INCONCLUSIVE": 0}
    for report in reports:
        for check in report.checks:
            counts[check.verdict] += 1
            checks.append(
                {
                    "suite": report.title,
                    "name": check.name,
                    "verdict": check.verdict,
                    "detail": check.detail,
                }
            )
    ok = counts["FAIL"] == 0
    payload = {"checks": checks, "counts": counts, "ok": ok}
    return payload, EXIT_OK if ok else EXIT_FAIL


def cmd_example(spec: ProblemSpec, payload: dict, args) -> tuple[dict, int]:
    name = args.name or payload.get("name", "e1")
    params = payload.get("params", {})
    if name == "e1":
        report = examples.example_one(
            ns=tuple(params.get("ns", (1, 2, 3, 4))),
            truncations=tuple(tuple(t) for t in params.get("truncations", ((1, 0), (2, 1), (3, 2)))),
        )
    elif name == "e2":
        kwargs = {}
        if "A" in params:
            kwargs["a"] = tuple(tuple(parse_rational(x) for x in row) for row in params["A"])
        if "pi0" in params:
            kwargs["pi0"] = tuple(parse_rational(x) for x in params["pi0"])
        samples = suites.example_sample_sets(args.seed, spec.n)
        report = examples.example_two(sample_sets=samples, **kwargs)
    else:
        raise KeyError(name)
    out, code = _report_payload([report])
    out["command"] = "example"
    out["name"] = name
    return out, code


def cmd_verify(spec: ProblemSpec, payload: dict, args) -> tuple[dict, int]:
    name = args.name or payload.get("suite", "all")
    reports = suites.run_suite(name, args.seed)
    out, code = _report_payload(reports)
    out["command"] = "verify"
    out["suite"] = name
    out["seed"] = args.seed
    return out, code


COMMANDS = {
    "eval": cmd_eval,
    "phi": cmd_phi,
    "psi": cmd_psi,
    "chain": cmd_chain,
    "example": cmd_example,
    "verify": cmd_verify,
}


def render_csv(payload: dict) -> str:
    rows = payload.get("rows") or payload.get("checks")
    if rows is None:
        rows = [payload]
    keys: list[str] = []
    for row in rows:
        for key in row:
            if key not in keys and not isinstance(row[key], (dict, list)):
                keys.append(key)
    lines = [",".join(keys)]
    for row in rows:
        lines.append(",".join(str(row.get(key, "")) for key in keys))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddmlab",
        description="exact cover-optimum computations on shift spaces",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("name", nargs="?", default=None,
                        help="suite or example name (verify/example only)")
    parser.add_argument("--spec", default=None, help="problem spec JSON file")
    parser.add_argument("--out", choices=["json", "csv"], default="json")
    parser.add_argument("--witness", action="store_true",
                        help="include optimal covers in the output")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--decimal", type=int, default=None, metavar="K",
                        help="add a K-digit decimal rendering (display only)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec) if args.spec else default_spec()
        payload = spec.commands.get(args.command, {})
        out, code = COMMANDS[args.command](spec, payload, args)
    except (BudgetExceededError, TooLargeError, DimensionCapError) as exc:
        print(json.dumps({"error": str(exc), "kind": "resource"}, sort_keys=True))
        return EXIT_RESOURCE
    except InfeasibleError as exc:
        print(json.dumps({"error": str(exc), "kind": "infeasible"}, sort_keys=True))
        return EXIT_FAIL
    except (LabError, KeyError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(json.dumps({"error": str(exc), "kind": "input"}, sort_keys=True))
        return EXIT_INPUT
    if args.out == "csv":
        sys.stdout.write(render_csv(out))
    else:
        print(json.dumps(out, sort_keys=True, separators=(",", ":")))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
