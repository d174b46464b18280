"""Damped Newton solve of ``F = 0, G = 0``."""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..errors import NonConvergenceError, RankDeficiencyError
from .jacobian import stacked_jacobian

TOL = 1e-9
MAX_ITER = 50


@dataclass
class NewtonReport:
    x: np.ndarray
    y: np.ndarray
    residual: float
    iterations: int
    history: list = field(default_factory=list)


def stacked_residual(sys, x, y, kp=None):
    """``||F||_1 + ||G||_1``."""
    F, G = sys.residual(x, y, kp)
    return float(np.abs(F).sum() + np.abs(G).sum())


def _solve(J, r, labels):
    try:
        lu, piv = scipy.linalg.lu_factor(J, check_finite=True)
    except (ValueError, np.linalg.LinAlgError):
        lu = None
    if lu is not None:
        d = np.abs(np.diag(lu))
        if d.min(initial=np.inf) > 1e-14 * max(1.0, d.max(initial=0.0)):
            return scipy.linalg.lu_solve((lu, piv), r)
    # identify the rows participating in the null left singular vector
    u, s, _ = np.linalg.svd(J)
    w = np.abs(u[:, -1])
    rows = [int(i) for i in np.flatnonzero(w > 0.1 * w.max())]
    raise RankDeficiencyError(
        f"singular iteration matrix (smallest singular value {s[-1]:.3e})",
        [labels[i] for i in rows])


def newton_equilibrium(sys, guess, kp=None, tol=TOL, max_iter=MAX_ITER, hold_x=False):
    """Solve for an equilibrium starting from ``guess = (x0, y0)``.

    With ``hold_x`` the states stay fixed and only ``G = 0`` is solved for
    the algebraic variables (consistent initialisation).  Steps are halved
    until the 1-norm residual decreases, so the accepted history is strictly
    monotone.  Returns a :class:`NewtonReport`.
    """
    x = np.array(guess[0], dtype=float)
    y = np.array(guess[1], dtype=float)
    if x.shape != (sys.n,) or y.shape != (sys.m,):
        raise ValueError(f"guess shapes {x.shape}, {y.shape} do not match n={sys.n}, m={sys.m}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("guess contains non-finite values")
    n = sys.n
    labels = list(sys.f_tags) + list(sys.g_tags)
    F, G, J = stacked_jacobian(sys, x, y, kp)
    res = float(np.abs(F).sum() + np.abs(G).sum()) if not hold_x else float(np.abs(G).sum())
    history = [res]
    best = (res, x.copy(), y.copy())
    for it in range(max_iter):
        if res <= tol:
            return NewtonReport(x, y, res, it, history)
        if hold_x:
            dy = _solve(J[n:, n:], -G, labels[n:])
            dz = np.concatenate([np.zeros(n), dy])
        else:
            dz = _solve(J, -np.concatenate([F, G]), labels)
        alpha = 1.0
        while alpha >= 1.0 / 1024:
            xt, yt = x + alpha * dz[:n], y + alpha * dz[n:]
            try:
                Ft, Gt = sys.residual(xt, yt, kp)
                rt = float(np.abs(Gt).sum()) if hold_x else float(np.abs(Ft).sum() + np.abs(Gt).sum())
            except ValueError:
                rt = np.inf
            if np.isfinite(rt) and rt < res:
                break
            alpha *= 0.5
        else:
            break
        x, y = xt, yt
        res = rt
        history.append(res)
        if res < best[0]:
            best = (res, x.copy(), y.copy())
        F, G, J = stacked_jacobian(sys, x, y, kp)
    if res <= tol:
        return NewtonReport(x, y, res, len(history) - 1, history)
    raise NonConvergenceError(
        f"Newton did not reach {tol:g} (best residual {best[0]:.3e})",
        best[0], (best[1], best[2]))
