"""Implicit trapezoidal integration of the semi-explicit DAE."""
import csv
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..errors import IntegrationError, NonConvergenceError
from .equilibrium import newton_equilibrium
from .jacobian import stacked_jacobian

H_MIN = 1e-5
H_MAX = 1e-2


@dataclass
class Event:
    """Switch to ``system`` at ``time`` (a setpoint step, for instance)."""

    time: float
    label: str
    system: object


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    events: list = field(default_factory=list)
    rejected: int = 0
    outputs: np.ndarray | None = None  # (steps, devices, 3): p, omega, |v|
    buses: list = field(default_factory=list)

    @property
    def final_x(self):
        return self.x[-1]


def _newton_step(sys, kp, x0, y0, f0, h, xp, yp, lu_cache, tol):
    """Solve one trapezoidal step; returns ``(x, y, f)`` or ``None``."""
    n = sys.n
    x, y = xp.copy(), yp.copy()
    for it in range(8):
        F, G = sys.residual(x, y, kp)
        r = np.concatenate([x - x0 - 0.5 * h * (f0 + F), G])
        if lu_cache.get("J") is None or it >= 2:
            lu_cache["J"] = stacked_jacobian(sys, x, y, kp)[2]
            lu_cache["lu"] = None
        if lu_cache.get("h") != h or lu_cache.get("lu") is None:
            M = lu_cache["J"].copy()
            M[:n] *= -0.5 * h
            M[:n, :n] += np.eye(n)
            try:
                lu_cache["lu"] = scipy.linalg.lu_factor(M)
            except (ValueError, np.linalg.LinAlgError):
                return None
            lu_cache["h"] = h
        dz = scipy.linalg.lu_solve(lu_cache["lu"], -r)
        if not np.all(np.isfinite(dz)):
            return None
        x = x + dz[:n]
        y = y + dz[n:]
        scale = tol * (1.0 + np.abs(np.concatenate([x, y])))
        if np.max(np.abs(dz) / scale) <= 1e-2:
            F, G = sys.residual(x, y, kp)
            if np.max(np.abs(G), initial=0.0) <= tol:
                return x, y, F
    lu_cache["J"] = lu_cache["lu"] = None
    return None


DIVERGENCE = 1e3
MAX_STEPS = 500_000
# consecutive steps allowed at h_min with the error test failing
FORCED_LIMIT = 50


def integrate(sys, init, horizon, tol=1e-6, h_min=H_MIN, h_max=H_MAX, events=(), kp=None,
              h0=None, record_every=1, divergence=DIVERGENCE, max_steps=MAX_STEPS):
    """Integrate from ``init = (x0, y0)`` over ``[0, horizon]``.

    ``y0`` is first made consistent with ``x0`` by a Newton solve.  Step
    size adapts between ``h_min`` and ``h_max`` from the difference between
    the trapezoidal corrector and an Adams-Bashforth-2 predictor.
    ``events`` switch the system at fixed times; each is logged.  Raises
    :class:`IntegrationError` if any state moves more than ``divergence``
    from its initial value, if the error test keeps failing at ``h_min``, or
    if the run needs more than ``max_steps`` steps.
    """
    if not h_min <= h_max:
        raise ValueError("h_min must not exceed h_max")
    x0, y0 = (np.array(v, dtype=float) for v in init)
    events = sorted(events, key=lambda e: e.time)
    log = []

    def consistent(system, x, y):
        if system.m == 0:
            return y
        try:
            return newton_equilibrium(system, (x, y), kp=kp, tol=tol * 1e-2, hold_x=True).y
        except NonConvergenceError as exc:
            raise IntegrationError(f"inconsistent initial algebraic state: {exc}", t) from None

    t = 0.0
    y0 = consistent(sys, x0, y0)
    ts, xs, ys = [0.0], [x0], [y0]
    f0, _ = sys.residual(x0, y0, kp)
    f_prev, h_prev = None, None
    h = h_min if h0 is None else h0
    h = min(max(h, h_min), h_max)
    lu_cache = {}
    rejected = 0
    forced = 0
    ev_i = 0
    step = 0
    while t < horizon - 1e-14:
        t_stop = horizon
        if ev_i < len(events) and events[ev_i].time <= horizon:
            t_stop = events[ev_i].time
        if t_stop - t <= 1e-14:
            ev = events[ev_i]
            sys = ev.system
            y0 = consistent(sys, x0, y0)
            f0, _ = sys.residual(x0, y0, kp)
            f_prev, h_prev = None, None
            lu_cache = {}
            log.append({"time": t, "event": ev.label})
            ys[-1] = y0
            ev_i += 1
            h = h_min if h0 is None else max(h_min, min(h0, h_max))
            continue
        h_step = min(h, t_stop - t)
        if f_prev is None:
            xp = x0 + h_step * f0
        else:
            r = h_step / h_prev
            xp = x0 + h_step * ((1 + 0.5 * r) * f0 - 0.5 * r * f_prev)
        out = _newton_step(sys, kp, x0, y0, f0, h_step, xp, y0, lu_cache, tol)
        if out is None:
            rejected += 1
            if h_step <= h_min * (1 + 1e-12):
                raise IntegrationError(f"corrector failed at t={t:.6g} with minimum step", t)
            h = max(h_step / 2, h_min)
            continue
        x1, y1, f1 = out
        if np.max(np.abs(x1 - xs[0]), initial=0.0) > divergence:
            raise IntegrationError(f"solution diverged near t={t:.6g}", t)
        if f_prev is not None:
            lte = (x1 - xp) / 6.0
            err = np.sqrt(np.mean((lte / (tol + tol * np.abs(x1))) ** 2)) if sys.n else 0.0
        else:
            err = 0.0
        if err > 1.0:
            if h_step > h_min * (1 + 1e-12):
                rejected += 1
                h = max(h_min, h_step * max(0.2, 0.9 * err ** (-1 / 3)))
                continue
            forced += 1
            if forced > FORCED_LIMIT:
                raise IntegrationError(
                    f"error tolerance not met at the minimum step near t={t:.6g}", t)
        else:
            forced = 0
        t += h_step
        f_prev, h_prev = f0, h_step
        x0, y0, f0 = x1, y1, f1
        step += 1
        if step > max_steps:
            raise IntegrationError(f"step budget of {max_steps} exhausted at t={t:.6g}", t)
        if step % record_every == 0 or t >= horizon - 1e-14 or t_stop - t <= 1e-14:
            ts.append(t)
            xs.append(x1)
            ys.append(y1)
        grow = 2.0 if err == 0.0 else min(2.0, max(0.2, 0.9 * err ** (-1 / 3)))
        if h_step < h:  # truncated by an event or the horizon
            grow = 1.0
        h = min(h_max, max(h_min, (h if h_step < h else h_step) * grow))
    traj = Trajectory(np.array(ts), np.array(xs).reshape(len(ts), sys.n),
                      np.array(ys).reshape(len(ts), sys.m), log, rejected)
    if hasattr(sys, "outputs"):
        traj.outputs = np.array([[o[1:] for o in sys.outputs(a, b)] for a, b in zip(traj.x, traj.y)])
        traj.buses = [c.bus for c in sys.components]
    return traj


def energy_integral(traj, Q=None, reference=None, rel_tol=1e-3):
    """Trapezoidal quadrature of ``dx^T Q dx`` with ``dx = x - reference``.

    ``reference`` defaults to the final state; the trajectory must have
    settled there (final deviation below ``rel_tol`` of the peak).
    """
    X = np.asarray(traj.x, dtype=float)
    ref = X[-1] if reference is None else np.asarray(reference, dtype=float)
    D = X - ref
    Q = np.eye(X.shape[1]) if Q is None else np.asarray(Q, dtype=float)
    peak = np.max(np.linalg.norm(D, axis=1), initial=0.0)
    if reference is None:
        tail = D[int(0.95 * len(D)):]
        final_dev = np.max(np.linalg.norm(tail, axis=1), initial=0.0)
    else:
        final_dev = np.linalg.norm(D[-1])
    if peak > 0 and final_dev > rel_tol * peak:
        raise IntegrationError(
            f"trajectory has not settled (final deviation {final_dev:.3e} vs peak {peak:.3e})",
            float(traj.t[-1]))
    w = np.einsum("ij,jk,ik->i", D, Q, D)
    return float(max(np.trapezoid(w, traj.t), 0.0))


def trajectory_csv(traj):
    """``t`` then ``p``, ``omega``, ``vmag`` per bus, fixed 9-decimal text."""
    if traj.outputs is None:
        raise ValueError("trajectory carries no per-bus outputs")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["t"]
    for b in traj.buses:
        header += [f"p_bus{b}", f"omega_bus{b}", f"vmag_bus{b}"]
    w.writerow(header)
    for t, row in zip(traj.t, traj.outputs):
        w.writerow([f"{t:.9f}"] + [f"{v:.9f}" for v in row.ravel()])
    return buf.getvalue()
