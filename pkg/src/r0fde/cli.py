"""Command-line front end.

Exit codes: 0 success, 1 a verification suite failed, 2 invalid input
(malformed spec or violated model assumptions), 3 numerical failure.
Set ``R0FDE_LOG=DEBUG`` (or INFO, WARNING, ...) for diagnostics on stderr.
"""
import argparse
import json
import logging
import os
import sys

import numpy as np

from . import verify as verify_mod
from .delay_op import HistorySegment
from .errors import AssumptionViolated, HorizonExceeded, NotCooperative, R0FdeError, SpecError
from .r0_engine import consistency_report
from .semigroup import integrate, linear_rhs
from .spectral import sign_equivalence_report
from .specfile import load_spec
from .svg import write_line_chart
from .tick import equilibrium, r0_closed_form, simulate

log = logging.getLogger("r0fde")

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _emit(payload, stream=None):
    stream = stream or sys.stdout
    json.dump(payload, stream, indent=2, sort_keys=True, default=_json_default)
    stream.write("\n")


def _load(args):
    spec = load_spec(args.spec)
    spec.model.order_eps = args.order_eps
    return spec


def cmd_r0(args):
    spec = _load(args)
    report = consistency_report(spec.model, t0=args.t0, n=args.grid, tol_mu=args.tol_mu,
                                method=args.method, force=args.force)
    out = report.to_dict()
    if args.method == "bisect":
        out["r0_direct"] = None
    if spec.tick is not None:
        out["r0_closed_form"] = r0_closed_form(spec.tick)
    _emit(out)
    return EXIT_OK


def cmd_stability(args):
    spec = _load(args)
    _emit(sign_equivalence_report(spec.model.combined).to_dict())
    return EXIT_OK


def _initial_history(spec_arg, m, tau, n):
    if spec_arg is None:
        return HistorySegment.constant(np.zeros(m), tau, n)
    if os.path.exists(spec_arg):
        with open(spec_arg) as fh:
            doc = json.load(fh)
        seg = HistorySegment(float(doc["tau"]), np.array(doc["values"], dtype=float))
        if seg.dim != m:
            raise SpecError(f"{spec_arg}: history has {seg.dim} components, model has {m}")
        return seg
    try:
        vals = [float(v) for v in spec_arg.split(",")]
    except ValueError:
        raise SpecError(f"--init: expected a file, a number or a comma list, got {spec_arg!r}") from None
    if len(vals) == 1:
        vals = vals * m
    if len(vals) != m:
        raise SpecError(f"--init: need 1 or {m} values, got {len(vals)}")
    return HistorySegment.constant(np.array(vals), tau, n)


def cmd_simulate(args):
    spec = _load(args)
    m = spec.model.dim
    tau = spec.tick.tau if spec.tick is not None else max(spec.model.F.max_delay, spec.model.V.max_delay)
    phi = _initial_history(args.init, m, tau, args.grid if tau > 0 else 0)
    if spec.tick is not None and not phi.is_nonnegative():
        raise SpecError("--init: tick populations must be nonnegative")
    if spec.tick is not None:
        traj = simulate(spec.tick, phi, args.T, args.step)
    else:
        traj = integrate(linear_rhs(spec.model.combined), phi, args.T, args.step)
    if args.out:
        traj.to_csv(args.out)
    else:
        w = sys.stdout
        w.write(",".join(["t"] + [f"u{i + 1}" for i in range(m)]) + "\n")
        for t, u in zip(traj.t, traj.states):
            w.write(",".join(repr(float(v)) for v in (t, *u)) + "\n")
    if args.plot:
        labels = ["L", "N", "A_q", "A_f"] if spec.tick is not None else None
        write_line_chart(args.plot, traj.t, traj.states.T, labels=labels, title=os.path.basename(args.spec))
    log.info("final state %s at t=%s", traj.states[-1], traj.t[-1])
    return EXIT_OK


def cmd_verify(args):
    spec = _load(args) if args.spec else None
    try:
        result = verify_mod.run(args.suite, spec, args.seed)
    except HorizonExceeded as exc:
        _emit({"suite": args.suite, "seed": args.seed, "passed": None, "status": "inconclusive",
               "message": str(exc), "details": exc.report.to_dict() if exc.report else None})
        return EXIT_NUMERIC
    _emit(result)
    return EXIT_OK if result["passed"] else EXIT_FAILED


def cmd_tick_equilibrium(args):
    spec = _load(args)
    if spec.tick is None:
        raise SpecError(f"{args.spec}: tick-equilibrium needs a tick spec")
    u = equilibrium(spec.tick)
    _emit({"r0": r0_closed_form(spec.tick),
           "equilibrium": None if u is None else dict(zip(("L", "N", "A_q", "A_f"), u.tolist()))})
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="r0fde", description="R0 and stability of linear delay systems")
    sub = p.add_subparsers(dest="command", required=True)

    def with_spec(name, help_, optional=False):
        sp = sub.add_parser(name, help=help_)
        if optional:
            sp.add_argument("spec", nargs="?", help="model spec JSON (omit for randomized batches)")
        else:
            sp.add_argument("spec", help="model spec JSON")
        sp.add_argument("--order-eps", type=float, default=0.0,
                        help="tolerance for sign checks on coefficients (default 0: exact)")
        return sp

    sp = with_spec("r0", "basic reproduction number report")
    sp.add_argument("--t0", type=float, default=None)
    sp.add_argument("--grid", type=int, default=128)
    sp.add_argument("--method", choices=("direct", "bisect", "both"), default="both")
    sp.add_argument("--tol-mu", type=float, default=1e-4)
    sp.add_argument("--force", action="store_true", help="skip assumption checks (results may be meaningless)")
    sp.set_defaults(func=cmd_r0)

    sp = with_spec("stability", "principal eigenvalue of F-V against s(hat(F-V))")
    sp.set_defaults(func=cmd_stability)

    sp = with_spec("simulate", "integrate the model and write a CSV trajectory")
    sp.add_argument("--init", default=None, help="history JSON file, a constant, or a comma list")
    sp.add_argument("--T", type=float, default=50.0)
    sp.add_argument("--step", type=float, default=0.05)
    sp.add_argument("--grid", type=int, default=64, help="history samples for constant --init")
    sp.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    sp.add_argument("--plot", default=None, help="SVG path")
    sp.set_defaults(func=cmd_simulate)

    sp = with_spec("verify", "run numerical verification suites", optional=True)
    sp.add_argument("--suite", choices=verify_mod.SUITES + tuple(verify_mod.SUITE_ALIASES) + ("all",), default="all")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)

    sp = with_spec("tick-equilibrium", "positive equilibrium of a tick spec")
    sp.set_defaults(func=cmd_tick_equilibrium)
    return p


def main(argv=None):
    level = os.environ.get("R0FDE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if getattr(args, "force", False):
        print("warning: --force: assumption checks are bypassed; R0 may have no meaning for this model",
              file=sys.stderr)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AssumptionViolated, NotCooperative) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (R0FdeError, ArithmeticError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
