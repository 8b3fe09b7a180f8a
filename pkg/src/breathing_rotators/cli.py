"""Command-line entry point: ``breathing-rotators <subcommand> ...``.

Exit codes
    0  success
    1  negative result (not certified, no certified PDE branch, degenerate kappa)
    2  domain error
    3  constraint violation or malformed input
    4  two computational routes disagree beyond tolerance
    5  ill-posed dynamics (diagnosis JSON on stdout)
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .dynamics import IntegratorConfig, conservation_report, integrate, write_trajectory_csv
from .errors import ConstraintViolation, DegenerateCase, DomainError, IllPosedError, SingularKinematics
from .fundamental import Grid, default_grid, domain_points, pde_report, verify_fundamental
from .hessian import gauge_coords, verify_eq3
from .models import Constant, model_from_dict
from .observables import (
    RotatorState,
    casimir_scales,
    casimirs_from_jet,
    casimirs_kinematic,
    state_invariants,
)
from .scan import Frame, scan, scan_gnuplot, trajectory_gnuplot, write_scan_csv

EXIT_OK, EXIT_NEGATIVE, EXIT_DOMAIN, EXIT_INPUT, EXIT_MISMATCH, EXIT_ILL_POSED = range(6)


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the malformed-input code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _attach_grid_values(argv):
    # grid specs may start with '-' (negative P); keep them bound to --grid
    out, it = [], iter(argv)
    for a in it:
        if a == "--grid":
            out.append("--grid=" + next(it, ""))
        else:
            out.append(a)
    return out


def _read_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed {what} file {path}: {exc}") from exc


def _model(d):
    try:
        return model_from_dict(d)
    except DomainError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed model specification: {exc!r}") from exc


def _load_state(args):
    d = _read_json(args.state, "state")
    if not isinstance(d, dict):
        raise InputError("state file must hold a JSON object")
    if args.m is not None:
        d["m"] = args.m
    if args.ell is not None:
        d["ell"] = args.ell
    return RotatorState.from_dict(d), d.get("model")


def _resolve_model(args, embedded=None, default=None):
    if getattr(args, "model", None):
        return _model(_read_json(args.model, "model"))
    if embedded is not None:
        return _model(embedded)
    if default is not None:
        return default
    raise InputError("--model is required")


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)


def _grid(args, model):
    return Grid.parse(args.grid) if args.grid else default_grid(model)


def cmd_invariants(args):
    state, embedded = _load_state(args)
    model = _resolve_model(args, embedded, default=Constant(1.0))
    P, Q = state_invariants(state)
    jet = model.jet(P, Q)
    closed = casimirs_from_jet(jet, P, Q, state.m, state.ell)
    kin = casimirs_kinematic(state, model)
    s_pp, s_ww = casimir_scales(jet, P, Q, state.m, state.ell)
    diff_pp = abs(kin.PP - closed.PP) / max(s_pp, state.m**2)
    diff_ww = abs(kin.WW - closed.WW) / max(s_ww, state.m**4 * state.ell**2)
    tol = args.tol if args.tol is not None else 1e-8
    report = {
        "P": P,
        "Q": Q,
        "closed": {"PP": closed.PP, "WW": closed.WW},
        "kinematic": {"PP": kin.PP, "WW": kin.WW},
        "rel_diff": {"PP": diff_pp, "WW": diff_ww},
        "tol": tol,
    }
    _emit(report, args.out)
    return EXIT_MISMATCH if max(diff_pp, diff_ww) > tol else EXIT_OK


def cmd_certify(args):
    model = _resolve_model(args)
    tol = args.tol if args.tol is not None else 1e-10
    m = args.m if args.m is not None else 1.0
    ell = args.ell if args.ell is not None else 1.0
    grid = _grid(args, model)
    rep = verify_fundamental(model, domain_points(model, grid), m, ell, tol, grid=grid)
    _emit(asdict(rep), args.out)
    return EXIT_OK if rep.certified else EXIT_NEGATIVE


def cmd_pde_residuals(args):
    model = _resolve_model(args)
    tol = args.tol if args.tol is not None else 1e-10
    grid = _grid(args, model)
    rep = pde_report(model, domain_points(model, grid), tol)
    out = asdict(rep)
    out["grid"] = grid.to_dict()
    _emit(out, args.out)
    return EXIT_OK if rep.certified_xsign is not None else EXIT_NEGATIVE


def cmd_scan(args):
    model = _resolve_model(args)
    grid = _grid(args, model)
    frame = Frame.from_seed(args.seed)
    rows = scan(model, grid, frame, args.m or 1.0, args.ell or 1.0, workers=args.workers)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_scan_csv(rows, fh)
        if args.gnuplot:
            Path(args.out).with_suffix(".gp").write_text(scan_gnuplot(Path(args.out).name))
    else:
        write_scan_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_verify_eq3(args):
    if not args.model:
        raise InputError("verify-eq3 needs at least two --model files")
    models = [_model(_read_json(p, "model")) for p in args.model]
    if len(models) < 2:
        raise InputError("verify-eq3 needs at least two --model files")
    state, _ = _load_state(args)
    tol = args.tol if args.tol is not None else 1e-8
    try:
        rep = verify_eq3(models, state)
    except DegenerateCase as exc:
        _emit({"degenerate": str(exc)}, args.out)
        return EXIT_NEGATIVE
    _emit({"kappas": list(rep.kappas), "max_rel_diff": rep.max_rel_diff, "tol": tol}, args.out)
    return EXIT_MISMATCH if rep.max_rel_diff > tol else EXIT_OK


def cmd_simulate(args):
    state, embedded = _load_state(args)
    model = _resolve_model(args, embedded)
    tol = args.tol if args.tol is not None else 1e-8
    cfg = IntegratorConfig(rtol=tol, atol=tol, span=args.span, max_step=args.max_step,
                           breathing_gauge=args.breathing_gauge)
    c0 = gauge_coords(state)
    position = state.x[1:] / state.ell
    traj = integrate(c0, model, cfg, state.m, state.ell, position=position)
    if traj.diagnosis is not None:
        _emit({**traj.diagnosis.to_dict(), "tau": traj.samples[-1].tau})
        return EXIT_ILL_POSED
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_trajectory_csv(traj, model, fh)
        if args.gnuplot:
            Path(args.out).with_suffix(".gp").write_text(trajectory_gnuplot(Path(args.out).name))
    rep = conservation_report(traj, model)
    _emit({"conservation": rep.to_dict(), "rejected_steps": traj.rejected, "tol": tol})
    return EXIT_OK


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (CSV for scan/simulate, JSON otherwise)")
    common.add_argument("--tol", type=float, help="tolerance (meaning depends on subcommand)")
    common.add_argument("--seed", type=int, default=0, help="seed for random frames")
    common.add_argument("--m", type=float, help="mass scale (overrides the state file)")
    common.add_argument("--ell", type=float, help="length scale (overrides the state file)")
    common.add_argument("--gnuplot", action="store_true", help="write a companion .gp script")

    p = _Parser(prog="breathing-rotators", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("invariants", parents=[common], help="P, Q, PP, WW by both routes")
    s.add_argument("--state", required=True)
    s.add_argument("--model")
    s.set_defaults(func=cmd_invariants)

    for name, func, helptext in (
        ("certify", cmd_certify, "certify the fundamental conditions on a grid"),
        ("pde-residuals", cmd_pde_residuals, "residuals of the recast PDE system"),
        ("scan", cmd_scan, "CSV scan of determinants, Jacobian and kappa"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--model", required=True)
        s.add_argument("--grid", help="Pmin:Pmax:n,Qmin:Qmax:n (default: 50x50, domain-clipped)")
        if name == "scan":
            s.add_argument("--workers", type=int, default=1)
        s.set_defaults(func=func)

    s = sub.add_parser("verify-eq3", parents=[common], help="kappa from several models at one state")
    s.add_argument("--model", action="append")
    s.add_argument("--state", required=True)
    s.set_defaults(func=cmd_verify_eq3)

    s = sub.add_parser("simulate", parents=[common], help="integrate the equations of motion")
    s.add_argument("--state", required=True)
    s.add_argument("--model")
    s.add_argument("--span", type=float, default=10.0)
    s.add_argument("--max-step", type=float, default=1.0)
    s.add_argument("--breathing-gauge", action="store_true",
                   help="treat the breathing mode as gauge (models nu P + f(Q))")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(_attach_grid_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        return args.func(args)
    except IllPosedError as exc:
        _emit(exc.diagnosis.to_dict())
        return EXIT_ILL_POSED
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConstraintViolation, SingularKinematics, InputError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
