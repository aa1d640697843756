"""Command-line entry point: ``qlandscape <subcommand> ...``.

Exit status is 0 on success, 1 for invalid input (including unknown flags
and unwritable paths) and 2 for numerical failures.  Files go to
``--output-dir``, defaulting to ``$QLANDSCAPE_OUTPUT_DIR`` or ``./qlandscape-output``.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .characters import (
    SU3Label,
    character,
    fidelity_from_character,
    format_label,
    parse_label,
    scan_landscape,
)
from .dynamics import load_problem, run_grape, trap_statistics
from .errors import InvalidInputError, NumericalError
from .figures import FIGURES
from .kinematics import AscentConfig, kinematic_flow, reduced_scan, spin_setup, spin_target
from .report import write_csv, write_json, write_text
from .representations import SpinLabel, lie_closure
from .topology import critical_points

OUTPUT_ENV = "QLANDSCAPE_OUTPUT_DIR"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; usage errors are invalid input here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _spin(text: str) -> SpinLabel:
    try:
        return SpinLabel.from_j(text)
    except InvalidInputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _angles(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"angles must be comma-separated numbers, got {text!r}") from None


def _output_dir(args) -> Path:
    return Path(args.output_dir or os.environ.get(OUTPUT_ENV) or "qlandscape-output")


def _emit_json(obj, args):
    if getattr(args, "output", None):
        write_json(args.output, obj)
        print(str(args.output))
    else:
        print(json.dumps(obj, indent=2, sort_keys=True))


def _emit_grid(grid, args, config: dict):
    meta = {"config": config, **grid.metadata}
    if args.format == "json":
        d = grid.to_json_dict()
        d["metadata"] = meta
        _emit_json(d, args)
        return
    text = grid.to_csv()
    if args.output:
        write_csv(args.output, text, meta)
        print(str(args.output))
    else:
        sys.stdout.write(text)
        print(json.dumps(meta, sort_keys=True), file=sys.stderr)


def _config(args) -> dict:
    skip = {"func", "command"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        if isinstance(v, (SpinLabel, SU3Label)):
            v = format_label(v)
        elif isinstance(v, Path):
            v = str(v)
        elif isinstance(v, list):
            v = [list(x) if isinstance(x, tuple) else x for x in v]
        out[k] = v
    out["command"] = args.command
    out["version"] = __version__
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_character(args) -> int:
    label = parse_label(args.label)
    pts = []
    for ang in args.angles:
        chi = complex(character(label, *ang))
        pts.append({"angles": list(ang), "chi": [chi.real, chi.imag],
                    "J": float(fidelity_from_character(label, *ang))})
    _emit_json({"label": format_label(label), "dim": label.dim, "points": pts, "config": _config(args)}, args)
    return EXIT_OK


def cmd_scan_su2(args) -> int:
    _emit_grid(scan_landscape(args.j, args.resolution), args, _config(args))
    return EXIT_OK


def cmd_scan_su3(args) -> int:
    _emit_grid(scan_landscape(SU3Label(args.r1, args.r2), args.resolution), args, _config(args))
    return EXIT_OK


def cmd_critical(args) -> int:
    label = parse_label(args.label)
    rep = critical_points(label, args.resolution, args.refine_tol)
    d = rep.to_json_dict()
    d["config"] = _config(args)
    if args.output:
        write_json(args.output, d)
        write_text(Path(args.output).with_suffix(".txt"), rep.to_table() + "\n")
        print(rep.to_table())
    elif args.table:
        print(rep.to_table())
    else:
        print(json.dumps(d, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_euler_scan(args) -> int:
    ops, _ = spin_setup(args.j)
    grid = reduced_scan(ops, spin_target(args.j, args.target), args.resolution)
    _emit_grid(grid, args, _config(args))
    return EXIT_OK


def cmd_kinematic_flow(args) -> int:
    _, alg = spin_setup(args.j)
    cfg = AscentConfig(tol=args.tol, max_iter=args.max_iter)
    runs = kinematic_flow(spin_target(args.j, args.target), alg, args.starts, args.seed, cfg)
    rows = [res.summary(seed) for seed, res in runs]
    if args.output:
        write_json(args.output, rows)
        write_json(Path(str(args.output) + ".meta.json"), {"config": _config(args)})
        print(str(args.output))
    else:
        print(json.dumps(rows, indent=2))
        print(json.dumps({"config": _config(args)}, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_grape(args) -> int:
    prob = load_problem(args.problem)
    if prob.target is None:
        raise InvalidInputError("problem file has no 'target' matrix")
    overrides = {k: getattr(args, k) for k in ("starts", "seed", "steps", "max_iter") if getattr(args, k) is not None}
    cfg = type(prob.experiment)(**{**prob.experiment.to_json_dict(), **overrides})
    outcomes = run_grape(prob.system, prob.target, cfg)
    lines = [json.dumps(o.to_json_dict(), sort_keys=True) for o in outcomes]
    text = "\n".join(lines) + "\n"
    meta = {"config": _config(args), "experiment": cfg.to_json_dict(),
            "dt": cfg.resolved_dt(prob.system)}
    if args.reference:
        ref = sorted(float(x) for x in args.reference.split(","))
        meta["trap_statistics"] = trap_statistics(outcomes, ref, args.band).to_json_dict()
    if args.output:
        write_text(args.output, text)
        write_json(Path(str(args.output) + ".meta.json"), meta)
        print(str(args.output))
    else:
        sys.stdout.write(text)
        print(json.dumps(meta, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_controllability(args) -> int:
    prob = load_problem(args.problem)
    rep = lie_closure(prob.system.generators())
    d = rep.to_json_dict()
    d["config"] = _config(args)
    _emit_json(d, args)
    return EXIT_OK


def cmd_figures(args) -> int:
    outdir = _output_dir(args)
    which = list(FIGURES) if args.which == "all" else [args.which]
    manifest = {"config": _config(args), "output_dir": str(outdir), "figures": {}}
    for name in which:
        kwargs = {}
        if args.resolution is not None:
            kwargs["resolution"] = args.resolution
        if name == "fig3":
            kwargs.update(starts=args.starts, seed=args.seed)
        manifest["figures"][name] = FIGURES[name](outdir, **kwargs)
    write_json(outdir / "manifest.json", manifest)
    print(json.dumps({k: v["summary"] for k, v in manifest["figures"].items()}, indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qlandscape", description="Control-landscape topology under dynamical symmetry.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="command")
    sub.required = True

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.set_defaults(func=func)
        return sp

    def out_flags(sp, formats=False):
        sp.add_argument("--output", "-o", type=Path, help="write to this file instead of stdout")
        if formats:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = add("character", cmd_character, "evaluate a character and J at torus points")
    sp.add_argument("--label", required=True, help="su2:j=J or su3:R1,R2")
    sp.add_argument("--angles", type=_angles, action="append", required=True,
                    help="comma-separated angles (beta, or theta1,theta2); repeatable")
    out_flags(sp)

    sp = add("scan-su2", cmd_scan_su2, "scan J over the SU(2) class angle on [0, pi/2]")
    sp.add_argument("--j", type=_spin, required=True, help="spin, e.g. 3, 7/2 or 3.5")
    sp.add_argument("--resolution", type=int, default=1024)
    out_flags(sp, formats=True)

    sp = add("scan-su3", cmd_scan_su3, "scan J over the SU(3) eigen-angle torus")
    sp.add_argument("--r1", type=int, required=True)
    sp.add_argument("--r2", type=int, required=True)
    sp.add_argument("--resolution", type=int, default=256)
    out_flags(sp, formats=True)

    sp = add("critical", cmd_critical, "locate and classify critical points")
    sp.add_argument("--label", required=True)
    sp.add_argument("--resolution", type=int, default=None)
    sp.add_argument("--refine-tol", type=float, default=1e-10)
    sp.add_argument("--table", action="store_true", help="print the human-readable table instead of JSON")
    out_flags(sp)

    sp = add("euler-scan", cmd_euler_scan, "reduced (theta, phi) scan of a spin-j gate landscape")
    sp.add_argument("--j", type=_spin, required=True)
    sp.add_argument("--target", choices=("identity", "flip"), default="identity")
    sp.add_argument("--resolution", type=int, default=256)
    out_flags(sp, formats=True)

    sp = add("kinematic-flow", cmd_kinematic_flow, "multi-start Riemannian ascent inside the spin group")
    sp.add_argument("--j", type=_spin, required=True)
    sp.add_argument("--target", choices=("identity", "flip"), default="identity")
    sp.add_argument("--starts", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=100_000)
    out_flags(sp)

    sp = add("grape", cmd_grape, "multi-start GRAPE on a problem file; JSON lines out")
    sp.add_argument("--problem", type=Path, required=True)
    sp.add_argument("--starts", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--steps", type=int)
    sp.add_argument("--max-iter", type=int)
    sp.add_argument("--reference", help="comma-separated reference J values for trap statistics")
    sp.add_argument("--band", type=float, default=2e-3)
    out_flags(sp)

    sp = add("controllability", cmd_controllability, "dynamical Lie algebra of a problem file")
    sp.add_argument("--problem", type=Path, required=True)
    out_flags(sp)

    sp = add("figures", cmd_figures, "regenerate figure data and SVG renderings")
    sp.add_argument("--which", choices=("fig1", "fig2", "fig3", "all"), default="all")
    sp.add_argument("--output-dir", type=Path, default=None,
                    help=f"defaults to ${OUTPUT_ENV} or ./qlandscape-output")
    sp.add_argument("--resolution", type=int, default=None)
    sp.add_argument("--starts", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
