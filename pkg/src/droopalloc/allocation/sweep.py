"""Parameter sweeps with a fresh equilibrium at every point."""
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields, replace

import numpy as np

from ..errors import (CaseValidationError, InstabilityError, InvalidArgumentError,
                      NonConvergenceError, RankDeficiencyError, SingularAlgebraicError)
from ..network import assemble
from ..numerics.equilibrium import newton_equilibrium
from ..numerics.jacobian import jacobians, reduce_effective
from ..numerics.lyapunov import certify

_PATH = re.compile(r"^bus(\d+)\.([A-Za-z_][A-Za-z0-9_]*)$")


def parse_param_path(case, path):
    """``"bus1.K_P"`` to ``(bus, name)``, checked against the case."""
    m = _PATH.match(path)
    if not m:
        raise InvalidArgumentError(f"parameter path {path!r} is not of the form bus<N>.<name>")
    bus, name = int(m.group(1)), m.group(2)
    dev = next((d for d in case.devices if d.bus == bus), None)
    if dev is None:
        raise InvalidArgumentError(f"parameter path {path!r}: bus {bus} has no device")
    if name not in {f.name for f in fields(dev.params)}:
        raise InvalidArgumentError(f"parameter path {path!r}: {dev.kind} devices have no {name}")
    return bus, name


def parse_range(text):
    """``"a:b:n"`` to ``n`` evenly spaced values from ``a`` to ``b``."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise InvalidArgumentError(f"range {text!r} is not of the form a:b:n") from None
    if n < 1:
        raise InvalidArgumentError("range needs at least one point")
    return np.linspace(a, b, n) if n > 1 else np.array([a])


def apply_overrides(case, assignments):
    devices = []
    for d in case.devices:
        upd = {name: float(v) for (bus, name), v in assignments if bus == d.bus}
        devices.append(replace(d, params=replace(d.params, **upd)) if upd else d)
    return replace(case, devices=tuple(devices))


def evaluate_point(case, assignments, Q=None, S=None):
    """Equilibrium from flat start, spectral abscissa and objective at one point."""
    row = {"converged": False, "residual": float("nan"), "spectral_abscissa": float("nan"),
           "objective": float("nan"), "feasible": False}
    try:
        sys = assemble(apply_overrides(case, assignments))
        rep = newton_equilibrium(sys, sys.flat_start())
        row["converged"], row["residual"] = True, rep.residual
        lin = jacobians(sys, (rep.x, rep.y))
        A = reduce_effective(lin)
        row["spectral_abscissa"] = float(np.max(np.linalg.eigvals(A).real))
        cert = certify(A, Q, S)
        row["objective"], row["feasible"] = cert.objective, True
    except (NonConvergenceError, RankDeficiencyError, SingularAlgebraicError,
            InstabilityError, CaseValidationError):
        pass
    return row


def _task(args):
    return evaluate_point(*args)


def sweep(case, paths, ranges, workers=1):
    """Cartesian sweep; rows follow ``itertools.product`` order over ``ranges``."""
    import itertools
    keys = [parse_param_path(case, p) for p in paths]
    grid = list(itertools.product(*ranges))
    Q = None if case.optimization.Q is None else np.asarray(case.optimization.Q)
    S = None if case.optimization.S is None else np.asarray(case.optimization.S)
    tasks = [(case, list(zip(keys, pt)), Q, S) for pt in grid]
    workers = workers or os.cpu_count() or 1
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_task(t) for t in tasks]
    return [(pt, r) for pt, r in zip(grid, results)]
