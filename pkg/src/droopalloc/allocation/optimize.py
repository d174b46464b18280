"""Box-constrained minimisation of the trace objective at a frozen equilibrium."""
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import InfeasibleError, InstabilityError, SingularAlgebraicError

ARMIJO = 1e-4
MAX_ITER = 500
MAX_BACKTRACK = 50


@dataclass
class StartRecord:
    start: np.ndarray
    label: str
    feasible: bool
    spectral_abscissa: float
    gains: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0
    pg_norm: float = float("nan")
    history: list = field(default_factory=list)


@dataclass
class InnerResult:
    gains: np.ndarray
    objective: float
    certificate: object
    starts: list
    pg_norm: float


def start_points(lower, upper, nominal, count, seed):
    """Nominal, midpoint, box corners, then uniform draws, truncated to ``count``."""
    lower, upper = np.asarray(lower, float), np.asarray(upper, float)
    pts = [(np.clip(nominal, lower, upper), "nominal"), (0.5 * (lower + upper), "midpoint")]
    k = lower.size
    if k <= 4:
        for bits in itertools.product((0, 1), repeat=k):
            pts.append((np.where(np.array(bits, bool), upper, lower), "corner"))
    else:
        pts += [(lower.copy(), "corner"), (upper.copy(), "corner")]
    rng = np.random.default_rng(seed)
    while len(pts) < count:
        pts.append((rng.uniform(lower, upper), "random"))
    unique, seen = [], set()
    for p, lab in pts[:max(count, 1)]:
        key = tuple(np.round(p, 12))
        if key not in seen:
            seen.add(key)
            unique.append((p, lab))
    return unique


def _project(k, lower, upper):
    return np.minimum(np.maximum(k, lower), upper)


def _safe_eval(problem, k, with_gradient=True):
    try:
        return problem.evaluate(k, with_gradient)
    except (InstabilityError, SingularAlgebraicError):
        return None


def projected_descent(problem, start, lower, upper, tol=1e-6, max_iter=MAX_ITER):
    """Projected gradient with Armijo backtracking and Barzilai-Borwein trial steps.

    Steps that leave the stable set are rejected like any failed Armijo
    test.  Returns ``(gains, value, certificate, iterations, pg_norm, history)``
    or ``None`` if ``start`` itself is unstable.
    """
    k = _project(np.asarray(start, float), lower, upper)
    out = _safe_eval(problem, k)
    if out is None:
        return None
    f, g, cert = out
    history = [f]
    alpha = 1.0 / max(np.linalg.norm(g), 1e-300)
    alpha *= max(1.0, np.max(upper - lower, initial=1.0) * 1e-2)
    pg = k - _project(k - g, lower, upper)
    it = 0
    for it in range(1, max_iter + 1):
        pg = k - _project(k - g, lower, upper)
        if np.linalg.norm(pg) <= tol * (1.0 + abs(f)):
            return k, f, cert, it - 1, float(np.linalg.norm(pg)), history
        accepted = False
        for _ in range(MAX_BACKTRACK):
            kn = _project(k - alpha * g, lower, upper)
            step = kn - k
            if not np.any(step):
                break
            trial = _safe_eval(problem, kn)
            if trial is not None and trial[0] <= f + ARMIJO * float(g @ step):
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        fn, gn, certn = trial
        s, yv = kn - k, gn - g
        sy = float(s @ yv)
        alpha = float(s @ s) / sy if sy > 0 else 2.0 * alpha
        k, f, g, cert = kn, fn, gn, certn
        history.append(f)
    pg = k - _project(k - g, lower, upper)
    return k, f, cert, it, float(np.linalg.norm(pg)), history


def inner_optimize(problem, lower, upper, nominal=None, starts=8, seed=0, tol=1e-6):
    """Multi-start projected descent on a :class:`FrozenProblem`.

    Raises :class:`InfeasibleError` with per-start spectral abscissae when no
    start is stable.
    """
    lower = np.asarray(lower, float)
    upper = np.asarray(upper, float)
    nominal = problem.kp_ref if nominal is None else np.asarray(nominal, float)
    records = []
    best = None
    for p, label in start_points(lower, upper, nominal, starts, seed):
        try:
            sa = problem.spectral_abscissa(p)
        except SingularAlgebraicError:
            sa = float("nan")
        res = projected_descent(problem, p, lower, upper, tol)
        if res is None:
            records.append(StartRecord(p, label, False, sa))
            continue
        k, f, cert, its, pgn, hist = res
        records.append(StartRecord(p, label, True, sa, k, f, its, pgn, hist))
        if best is None or f < best[1]:
            best = (k, f, cert, pgn)
    if best is None:
        raise InfeasibleError("no stable point found from any start",
                              [r.spectral_abscissa for r in records])
    return InnerResult(best[0], best[1], best[2], records, best[3])


def _grid_row(args):
    problem, k1_values, k2 = args
    row = []
    for k1 in k1_values:
        kp = np.array([k1, k2])
        try:
            lin, _ = problem.linearized(kp)
            A = lin.A_eff
            sa = float(np.max(np.linalg.eigvals(A).real))
        except SingularAlgebraicError:
            row.append((k1, k2, float("nan"), float("nan"), False))
            continue
        val = problem.value(kp) if sa < 0 else None
        row.append((k1, k2, float("nan") if val is None else val, sa, val is not None))
    return row


def grid_scan(problem, lower, upper, points=60, workers=1):
    """Objective and spectral abscissa on a ``points x points`` grid (two gains only).

    Rows are ``(k1, k2, objective, spectral_abscissa, feasible)`` with
    ``k1`` varying fastest.
    """
    if problem.sys.n_gains != 2:
        raise ValueError("grid scan needs exactly two gains")
    g1 = np.linspace(lower[0], upper[0], points)
    g2 = np.linspace(lower[1], upper[1], points)
    tasks = [(problem, g1, k2) for k2 in g2]
    workers = workers or os.cpu_count() or 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_grid_row, tasks))
    else:
        rows = [_grid_row(t) for t in tasks]
    return [r for row in rows for r in row]


def grid_certify(rows, value, lower, upper, points):
    """Whether no grid point beats ``value`` by more than the resolution slack.

    The slack is the largest objective change between neighbouring grid
    points around the grid minimum.  Returns ``(ok, grid_min, slack)``.
    """
    vals = np.array([r[2] for r in rows], float).reshape(points, points)
    if not np.any(np.isfinite(vals)):
        return False, float("nan"), float("nan")
    i, j = np.unravel_index(np.nanargmin(vals), vals.shape)
    grid_min = float(vals[i, j])
    nb = [vals[a, b] for a, b in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1))
          if 0 <= a < points and 0 <= b < points and np.isfinite(vals[a, b])]
    slack = max((abs(v - grid_min) for v in nb), default=0.0)
    return bool(grid_min >= value - slack), grid_min, slack
