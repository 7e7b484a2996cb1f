"""Command line front end: solve problems, check contraction gates, read solutions.

Commands:
  solve <config>            iterate to the fixed point and export samples
  check <config>            print the gate constants and the observed factor
  eval <solution> --at ...  look up solution values, interpolating off-grid

Exit codes: 0 success (for check: configured gate < 1), 1 failed gate check,
2 configuration errors, 3 gate >= 1 on solve or non-convergence.  CSV output
follows RFC 4180 with floats at 17 significant digits; identical configs and
seeds produce byte-identical files.  CLIFRACT_OUTPUT_DIR, when set, anchors
relative output paths.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .algebra import blade_key
from .config import ConfigError, ProblemSetup, build_problem, load_config
from .engine import (
    ConvergenceError,
    SpaceSpec,
    empirical_gamma,
    field_sup,
    fixed_point,
    gamma_gate,
    rb_apply,
)
from .lift import (
    CliffordGridFunction,
    clifford_empirical_gamma,
    clifford_fixed_point,
    residual,
)

__all__ = ["main"]

OUTPUT_DIR_ENV = "CLIFRACT_OUTPUT_DIR"

EXIT_OK = 0
EXIT_GATE_FAILED = 1
EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clifract",
        description="Clifford-valued fractal interpolation solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve a problem config and export the fixed point")
    solve.add_argument("config", help="path to a JSON problem config")
    solve.add_argument("--output", help="output file path (default: <config stem>.out.<format>)")
    solve.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    solve.add_argument("--quiet", action="store_true", help="suppress the solve report")
    solve.set_defaults(handler=_cmd_solve)

    check = sub.add_parser("check", help="evaluate the contraction gates for a config")
    check.add_argument("config", help="path to a JSON problem config")
    check.add_argument("--quiet", action="store_true", help="print only the verdict line")
    check.set_defaults(handler=_cmd_check)

    ev = sub.add_parser("eval", help="evaluate an exported solution at given points")
    ev.add_argument("solution", help="solution file written by solve (csv or json)")
    ev.add_argument("--at", required=True, help="comma-separated x values")
    ev.set_defaults(handler=_cmd_eval)
    return parser


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def _resolve_output(args, setup: ProblemSetup, fmt: str) -> Path:
    out_cfg = setup.config.output or {}
    raw = args.output or out_cfg.get("path") or f"{Path(args.config).stem}.out.{fmt}"
    path = Path(raw)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _iteration_gamma(gate: float, sup_factor: float) -> float:
    # The stopping rule lives in the sup norm, whose exact grid Lipschitz
    # constant is max ||s_i||; fall back to the (space) gate when that
    # exceeds 1 while the gate still certifies contraction.
    return sup_factor if sup_factor < 1.0 else gate


def _cmd_solve(args) -> int:
    setup = build_problem(load_config(args.config))
    cfg = setup.config
    params = setup.params
    gate = gamma_gate(cfg.space, params)
    sup_factor = max(field_sup(entry, setup.partition) for entry in params.s)

    if not gate < 1.0:
        print(
            f"gate failed: gamma[{cfg.space.tag}] = {_fmt(gate)} >= 1; no output written",
            file=sys.stderr,
        )
        return EXIT_NO_CONVERGENCE

    gamma = _iteration_gamma(gate, sup_factor)
    fmt = args.format or (cfg.output or {}).get("format") or "csv"
    out_path = _resolve_output(args, setup, fmt)

    try:
        if setup.scalar_mode:
            result = fixed_point(
                params, cfg.grid_m, tol=cfg.tol, gamma=gamma, max_iter=cfg.max_iter
            )
            psi = result.function
            iterations = result.iterations
            resid = float(np.max(np.abs(rb_apply(params, psi).values - psi.values)))
            empirical = empirical_gamma(params, cfg.grid_m, cfg.trials, cfg.seed)
        else:
            lifted = clifford_fixed_point(
                params, cfg.grid_m, tol=cfg.tol, gamma=gamma, max_iter=cfg.max_iter
            )
            psi = lifted.function
            iterations = max(lifted.iterations.values(), default=1)
            resid = residual(params, psi)
            empirical = clifford_empirical_gamma(params, cfg.grid_m, cfg.trials, cfg.seed)
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE

    out_path.parent.mkdir(parents=True, exist_ok=True)
    if setup.scalar_mode:
        _write_scalar(out_path, fmt, psi)
    else:
        _write_clifford(out_path, fmt, psi)

    if not args.quiet:
        print(f"iterations: {iterations}")
        print(f"gamma[{cfg.space.tag}]: {_fmt(gate)}")
        print(f"empirical gamma: {_fmt(empirical)}")
        print(f"residual: {_fmt(resid)}")
        print(f"output: {out_path}")
    return EXIT_OK


def _grid_xs(psi) -> np.ndarray:
    return psi.xs if hasattr(psi, "xs") else psi.component(0).xs


def _write_scalar(path: Path, fmt: str, psi) -> None:
    xs = psi.xs
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "value"])
            for x, v in zip(xs, psi.values):
                writer.writerow([_fmt(x), _fmt(v)])
    else:
        rows = [{"x": float(x), "value": float(v)} for x, v in zip(xs, psi.values)]
        path.write_text(json.dumps(rows, indent=2) + "\n")


def _write_clifford(path: Path, fmt: str, psi: CliffordGridFunction) -> None:
    # Zero components are materialized on export: one column per blade.
    masks = list(range(1 << psi.n))
    columns = [psi.component(mask).values for mask in masks]
    xs = _grid_xs(psi)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x"] + [blade_key(mask) for mask in masks])
            for j, x in enumerate(xs):
                writer.writerow([_fmt(x)] + [_fmt(col[j]) for col in columns])
    else:
        rows = [
            {
                "x": float(x),
                "coeffs": {blade_key(mask): float(col[j]) for mask, col in zip(masks, columns)},
            }
            for j, x in enumerate(xs)
        ]
        path.write_text(json.dumps(rows, indent=2) + "\n")


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _report_spaces(space: SpaceSpec) -> list[SpaceSpec]:
    """All six gates with the configured indices, defaulting the absent ones."""
    k = space.k if space.k is not None else 0
    alpha = space.alpha if space.alpha is not None else 1.0
    p = space.p if space.p is not None else 2.0
    q = space.q if space.q is not None else p
    s = space.s if space.s is not None else 1.0
    return [
        SpaceSpec.ck(k),
        SpaceSpec.ck_alpha(k, alpha),
        SpaceSpec.lp(p),
        SpaceSpec.sobolev(s, p),
        SpaceSpec.besov(s, p, q),
        SpaceSpec.triebel_lizorkin(s, p, q),
    ]


def _space_label(space: SpaceSpec) -> str:
    parts = [
        f"{name}={getattr(space, name)}"
        for name in ("k", "alpha", "p", "q", "s")
        if getattr(space, name) is not None
    ]
    return f"{space.tag}({', '.join(parts)})"


def _cmd_check(args) -> int:
    setup = build_problem(load_config(args.config))
    cfg = setup.config
    params = setup.params
    configured = gamma_gate(cfg.space, params)
    if setup.scalar_mode:
        empirical = empirical_gamma(params, cfg.grid_m, cfg.trials, cfg.seed)
    else:
        empirical = clifford_empirical_gamma(params, cfg.grid_m, cfg.trials, cfg.seed)

    if not args.quiet:
        print(f"{'space':<28} {'gamma':<24} contraction")
        for spec in _report_spaces(cfg.space):
            value = gamma_gate(spec, params)
            print(f"{_space_label(spec):<28} {_fmt(value):<24} {'yes' if value < 1 else 'NO'}")
        print(f"{'empirical (sup norm)':<28} {_fmt(empirical)}")
    verdict = "passes" if configured < 1.0 else "FAILS"
    print(f"configured {_space_label(cfg.space)}: gamma = {_fmt(configured)} ({verdict})")
    return EXIT_OK if configured < 1.0 else EXIT_GATE_FAILED


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def _read_solution(path: Path) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Returns (column names, x grid, value matrix of shape (len(xs), cols))."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("<solution>", f"cannot read {path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("["):
        rows = json.loads(text)
        if not rows:
            raise ConfigError("<solution>", "empty solution file")
        xs = np.array([row["x"] for row in rows])
        if "value" in rows[0]:
            return ["value"], xs, np.array([[row["value"]] for row in rows])
        keys = list(rows[0]["coeffs"])
        data = np.array([[row["coeffs"][key] for key in keys] for row in rows])
        return keys, xs, data
    reader = csv.reader(text.splitlines())
    header = next(reader, None)
    if not header or header[0] != "x":
        raise ConfigError("<solution>", "expected a CSV header starting with 'x'")
    body = [[float(cell) for cell in row] for row in reader if row]
    matrix = np.array(body)
    if matrix.ndim != 2 or matrix.shape[1] != len(header):
        raise ConfigError("<solution>", "malformed CSV body")
    return header[1:], matrix[:, 0], matrix[:, 1:]


def _cmd_eval(args) -> int:
    try:
        points = [float(tok) for tok in args.at.split(",") if tok.strip()]
    except ValueError:
        print("config error: --at expects comma-separated numbers", file=sys.stderr)
        return EXIT_CONFIG
    if not points:
        print("config error: --at expects at least one x value", file=sys.stderr)
        return EXIT_CONFIG
    names, xs, data = _read_solution(Path(args.solution))
    lo, hi = float(xs[0]), float(xs[-1])

    writer = csv.writer(sys.stdout)
    writer.writerow(["x"] + names + ["source"])
    for x in points:
        if x < lo or x > hi:
            print(f"config error: x = {x:g} outside the domain [{lo:g}, {hi:g}]", file=sys.stderr)
            return EXIT_CONFIG
        idx = int(np.searchsorted(xs, x))
        if idx <= len(xs) - 1 and idx >= 0 and x == xs[idx]:
            row, source = data[idx], "grid"
        elif idx > 0 and x == xs[idx - 1]:
            row, source = data[idx - 1], "grid"
        else:
            right = idx if xs[idx] > x else idx + 1
            left = right - 1
            w = (x - xs[left]) / (xs[right] - xs[left])
            row, source = (1.0 - w) * data[left] + w * data[right], "interpolated"
        writer.writerow([_fmt(x)] + [_fmt(v) for v in row] + [source])
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
