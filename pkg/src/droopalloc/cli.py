"""Command-line entry point: equilibrium, optimize, simulate, allocate, sweep."""
import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings

import numpy as np

from . import __version__
from .allocation import (classify, grid_certify, grid_scan, outer_iterate, parse_range,
                         sweep, FrozenProblem)
from .caselib import ScenarioId, load_builtin, load_case_file
from .errors import (CaseValidationError, DroopAllocError, InfeasibleError, IntegrationError,
                     InvalidArgumentError, NonConvergenceError, RankDeficiencyError,
                     SeedInstabilityError)
from .network import assemble
from .numerics.equilibrium import newton_equilibrium
from .numerics.integrate import trajectory_csv
from .numerics.jacobian import jacobians, reduce_effective
from .numerics.lyapunov import ConditioningWarning, certify
from .simulation import parse_disturbance, simulate_case, summarize

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_SEED = 3
EXIT_INTEGRATION = 4

OUT_ENV = "DROOPALLOC_OUT"
DEFAULT_OUT = "droopalloc-out"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _clean(o):
    # JSON has no inf/nan; write them as null
    if isinstance(o, float) and not math.isfinite(o):
        return None
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, np.generic):
        return _clean(o.item())
    return o


def dumps(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False,
                      default=_json_default) + "\n"


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "" if not math.isfinite(v) else repr(float(v))
    return str(v)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


class Run:
    """Collects artifacts for one command and writes the manifest."""

    def __init__(self, args):
        self.args = args
        self.out = args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT
        os.makedirs(self.out, exist_ok=True)
        self.artifacts = []
        self.t0 = time.perf_counter()

    def write(self, name, text):
        path = os.path.join(self.out, name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        self.artifacts.append(name)
        return path

    def path(self, name):
        self.artifacts.append(name)
        return os.path.join(self.out, name)

    def finish(self, status):
        opts = {k: v for k, v in vars(self.args).items() if k not in ("func",)}
        manifest = {
            "command": self.args.command,
            "case": getattr(self.args, "case", None),
            "options": opts,
            "artifacts": sorted(self.artifacts),
            "exit_code": status,
            "wall_clock_s": round(time.perf_counter() - self.t0, 3),
            "version": __version__,
        }
        with open(os.path.join(self.out, "manifest.json"), "w", encoding="utf-8") as fh:
            fh.write(dumps(manifest))


def _load(spec):
    if os.path.exists(spec):
        return load_case_file(spec)
    try:
        sid = ScenarioId.parse(spec)
    except InvalidArgumentError as exc:
        raise InvalidArgumentError(f"{spec!r} is neither a case file nor a scenario id ({exc})") from None
    return load_builtin(sid)


def _gains(text, case):
    if text is None:
        return case.nominal_gains()
    try:
        vals = np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise InvalidArgumentError(f"gains {text!r} must be comma-separated numbers") from None
    if vals.size != len(case.unified_devices()):
        raise InvalidArgumentError(
            f"expected {len(case.unified_devices())} gains, got {vals.size}")
    if np.any(vals < 0):
        raise InvalidArgumentError("gains must be non-negative")
    return vals


def cmd_equilibrium(args, run):
    case = _load(args.case)
    gains = _gains(args.gains, case)
    sys_ = assemble(case.with_gains(gains) if gains.size else case)
    rep = newton_equilibrium(sys_, sys_.flat_start())
    doc = {
        "case": case.name or args.case,
        "gains": gains,
        "residual": rep.residual,
        "iterations": rep.iterations,
        "x": dict(zip(sys_.x_labels, rep.x)),
        "y": dict(zip(sys_.y_labels, rep.y)),
        "dimensions": {"n": sys_.n, "m": sys_.m},
    }
    try:
        A = reduce_effective(jacobians(sys_, (rep.x, rep.y)))
        eig = np.linalg.eigvals(A)
        sa = float(np.max(eig.real))
        doc["spectral_abscissa"] = sa
        doc["stable"] = sa < 0
    except DroopAllocError as exc:
        doc["stable"] = False
        doc["note"] = str(exc)
    run.write("equilibrium.json", dumps(doc))
    print(f"residual {rep.residual:.3e} after {rep.iterations} Newton steps; "
          f"{'stable' if doc['stable'] else 'NOT stable'}"
          + (f" (spectral abscissa {doc['spectral_abscissa']:.6g})" if "spectral_abscissa" in doc else ""))
    return EXIT_OK


def cmd_optimize(args, run):
    case = _load(args.case)
    if not case.unified_devices():
        raise InvalidArgumentError("case has no unified devices to optimise")
    opt = case.optimization
    Q = None if opt.Q is None else np.asarray(opt.Q)
    S = None if opt.S is None else np.asarray(opt.S)
    res = outer_iterate(case, epsilon=args.epsilon, max_outer=args.max_outer, starts=args.starts,
                        seed=args.seed, Q=Q, S=S)
    sys_ = assemble(case)
    doc = res.to_dict(sys_)
    doc["starts"] = [
        {"label": s.label, "start": s.start, "feasible": s.feasible,
         "spectral_abscissa": s.spectral_abscissa, "gains": s.gains, "objective": s.objective,
         "iterations": s.iterations}
        for s in res.inner[-1].starts]
    hdr = ["k"] + [f"K_P{i + 1}" for i in range(sys_.n_gains)] + ["residual", "objective",
                                                                  "spectral_abscissa"]
    rows = [[it.k, *it.gains, it.residual, it.objective, it.spectral_abscissa]
            for it in res.iterations]
    run.write("iterations.csv", csv_text(hdr, rows))
    grid_rows = None
    if args.grid_certify:
        lower, upper = case.bounds()
        problem = FrozenProblem(sys_, res.x, res.y, Q, S, kp_ref=res.gains)
        grid_rows = grid_scan(problem, lower, upper, args.grid_points, workers=args.workers)
        ok, gmin, slack = grid_certify(grid_rows, res.certificate.objective, lower, upper,
                                       args.grid_points)
        doc["grid"] = {"points": args.grid_points, "certified": ok, "grid_minimum": gmin,
                       "slack": slack}
        run.write("grid.csv", csv_text(["K_P1", "K_P2", "objective", "spectral_abscissa",
                                        "feasible"], grid_rows))
    run.write("optimization.json", dumps(doc))
    if args.plot:
        from . import plotting
        plotting.plot_iterations(res, run.path("iterations.png"))
        if grid_rows is not None:
            plotting.plot_grid(grid_rows, args.grid_points, run.path("grid.png"), res.gains)
    status = "converged" if res.converged else "did NOT converge"
    print(f"{status} after {len(res.iterations)} outer iteration(s): gains "
          + ", ".join(f"{g:.3f}" for g in res.gains)
          + f"; residual {res.iterations[-1].residual:.3e}; objective {res.certificate.objective:.6g}")
    if "grid" in doc:
        print(f"grid certification {'passed' if doc['grid']['certified'] else 'FAILED'} "
              f"(grid minimum {doc['grid']['grid_minimum']:.6g})")
    return EXIT_OK if res.converged else EXIT_FAILURE


def cmd_simulate(args, run):
    case = _load(args.case)
    dist = "default" if args.disturbance is None else parse_disturbance(args.disturbance)
    gains = _gains(args.gains, case) if case.unified_devices() else None
    traj = simulate_case(case, horizon=args.horizon, disturbance=dist, gains=gains, tol=args.tol)
    t0 = traj.events[0]["time"] if traj.events else 0.0
    summary = summarize(traj, t0)
    summary["case"] = case.name or args.case
    run.write("trajectory.csv", trajectory_csv(traj))
    run.write("summary.json", dumps(summary))
    if args.plot:
        from . import plotting
        plotting.plot_trajectory(traj, run.path("trajectory.png"))
    st = summary["settling_time"]
    print(f"{summary['steps']} steps; settling time "
          + ("not reached" if st is None else f"{st:.4f} s")
          + f"; final frequency spread {summary['frequency_spread']:.3e}")
    return EXIT_OK


def _reference_for(spec, given):
    if given:
        return given
    if os.path.exists(spec):
        raise InvalidArgumentError("--reference is required when the case is a file")
    sid = ScenarioId.parse(spec)
    return str(ScenarioId("base", sid.mix))


def cmd_allocate(args, run):
    ref_spec = _reference_for(args.case, args.reference)
    case = _load(args.case)
    ref_case = _load(ref_spec)
    if not case.unified_devices():
        raise InvalidArgumentError("case has no unified devices")
    res = outer_iterate(case, seed=args.seed, starts=args.starts)
    ref = res if ref_spec == args.case else outer_iterate(ref_case, seed=args.seed, starts=args.starts)
    if len(ref.gains) != len(res.gains):
        raise InvalidArgumentError("reference case has a different number of unified devices")
    buses = [d.bus for d in case.unified_devices()]
    report = classify(res.gains, ref.gains, buses,
                      notes=[f"case: {case.name or args.case}", f"reference: {ref_case.name or ref_spec}"])
    doc = report.to_dict()
    doc["converged"] = {"case": res.converged, "reference": ref.converged}
    run.write("allocation.json", dumps(doc))
    text = report.table()
    run.write("allocation.txt", text + "\n")
    print(text)
    return EXIT_OK


def cmd_sweep(args, run):
    case = _load(args.case)
    if len(args.param) != len(args.range):
        raise InvalidArgumentError("give one --range per --param")
    ranges = [parse_range(r) for r in args.range]
    rows = sweep(case, args.param, ranges, workers=args.workers)
    hdr = list(args.param) + ["converged", "residual", "spectral_abscissa", "objective", "feasible"]
    out = [[*pt, r["converged"], r["residual"], r["spectral_abscissa"], r["objective"], r["feasible"]]
           for pt, r in rows]
    run.write("sweep.csv", csv_text(hdr, out))
    feas = sum(r["feasible"] for _, r in rows)
    print(f"{len(rows)} points, {feas} feasible")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="droopalloc", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("case", help="case file path or scenario id such as base/unified-unified")
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")

    sp = sub.add_parser("equilibrium", help="solve the equilibrium and report stability")
    common(sp)
    sp.add_argument("--gains", help="comma-separated K_P per unified device")
    sp.set_defaults(func=cmd_equilibrium)

    sp = sub.add_parser("optimize", help="optimise the droop gains")
    common(sp)
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--starts", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--max-outer", type=int)
    sp.add_argument("--grid-certify", action="store_true", help="also scan the gain box")
    sp.add_argument("--grid-points", type=int, default=60)
    sp.add_argument("--workers", type=int, default=0, help="worker processes (0: all cores)")
    sp.add_argument("--plot", action="store_true", help="also write PNG figures")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("simulate", help="time-domain run after a setpoint step")
    common(sp)
    sp.add_argument("--horizon", type=float)
    sp.add_argument("--disturbance", help="'none' or bus:param:delta@time")
    sp.add_argument("--gains", help="comma-separated K_P per unified device")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--plot", action="store_true", help="also write PNG figures")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("allocate", help="compare optimal gains against a reference case")
    common(sp)
    sp.add_argument("--reference", help="reference case (default: base scenario of the same mix)")
    sp.add_argument("--starts", type=int)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_allocate)

    sp = sub.add_parser("sweep", help="evaluate a grid of device parameters")
    common(sp)
    sp.add_argument("--param", action="append", required=True, help="bus<N>.<name>, repeatable")
    sp.add_argument("--range", action="append", required=True, help="a:b:n, one per --param")
    sp.add_argument("--workers", type=int, default=0, help="worker processes (0: all cores)")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        run = Run(args)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_INPUT
    warnings.simplefilter("ignore", ConditioningWarning)
    try:
        status = args.func(args, run)
    except (CaseValidationError, InvalidArgumentError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = EXIT_INPUT
    except SeedInstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = EXIT_SEED
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = EXIT_INTEGRATION
    except (NonConvergenceError, RankDeficiencyError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = EXIT_FAILURE
    run.finish(status)
    return status


if __name__ == "__main__":
    sys.exit(main())
