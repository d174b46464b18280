"""Disturbance runs on a case and the settling metrics used to rank device mixes."""
import math
import re
from dataclasses import replace

import numpy as np

from .errors import IntegrationError, InvalidArgumentError
from .network import Disturbance, assemble
from .numerics.equilibrium import newton_equilibrium
from .numerics.integrate import Event, integrate

BAND = 0.02


def parse_disturbance(text):
    """``"none"`` or ``"bus:param:delta@time"``, e.g. ``"1:p_star:0.1@0.1"``."""
    if text is None or text.lower() == "none":
        return None
    try:
        head, time = text.split("@")
        bus, param, delta = head.split(":")
        return Disturbance(int(bus), param, float(delta), float(time))
    except ValueError:
        raise InvalidArgumentError(
            f"disturbance {text!r} is not 'none' or of the form bus:param:delta@time") from None


def simulate_case(case, horizon=None, disturbance="default", gains=None, tol=None):
    """Equilibrium start, optional setpoint step, trapezoidal run.

    Returns the trajectory with its time axis in seconds.
    """
    sim = case.simulation
    horizon = sim.horizon if horizon is None else horizon
    tol = sim.tol if tol is None else tol
    dist = sim.disturbance if disturbance == "default" else disturbance
    if gains is not None:
        case = case.with_gains(gains)
    sys = assemble(case)
    rep = newton_equilibrium(sys, sys.flat_start())
    scale = sys.time_scale
    events = []
    if dist is not None and dist.time < horizon:
        dev = next((d for d in case.devices if d.bus == dist.bus), None)
        if dev is None or not hasattr(dev.params, dist.param):
            raise InvalidArgumentError(f"cannot apply disturbance to bus {dist.bus} {dist.param}")
        after = sys.with_param(dist.bus, dist.param, getattr(dev.params, dist.param) + dist.delta)
        events.append(Event(dist.time * scale, f"bus{dist.bus}.{dist.param} {dist.delta:+g}", after))
    try:
        traj = integrate(sys, (rep.x, rep.y), horizon * scale, tol=tol,
                         h_min=sim.h_min * scale, h_max=sim.h_max * scale, events=events)
    except IntegrationError as exc:
        t_fail = exc.last_time / scale
        # the solver reports its own (possibly per-unit) time; keep only the reason
        reason = re.sub(r" (near|at) t=\S+", "", str(exc))
        raise IntegrationError(f"integration failed near t={t_fail:.6g} s: {reason}", t_fail) from None
    traj.t = traj.t / scale
    for ev in traj.events:
        ev["time"] = ev["time"] / scale
    return traj


def settling_time(t, s, t0, band=BAND):
    """Time after ``t0`` until ``s`` stays within ``band`` of its peak deviation from the final value.

    ``inf`` when the signal is still outside the band over the last tenth of the run.
    """
    t = np.asarray(t)
    s = np.asarray(s)
    mask = t >= t0
    t, s = t[mask], s[mask]
    dev = np.abs(s - s[-1])
    peak = dev.max(initial=0.0)
    if peak == 0.0:
        return 0.0
    outside = np.flatnonzero(dev > band * peak)
    if outside.size == 0:
        return 0.0
    last = t[min(outside[-1] + 1, len(t) - 1)]
    if last >= t[-1] - 0.1 * (t[-1] - t[0]):
        return math.inf
    return float(last - t0)


def summarize(traj, t0=0.0):
    """Per-bus settling times, peak deviations and the final frequency spread."""
    buses = []
    worst = 0.0
    for j, bus in enumerate(traj.buses):
        p = traj.outputs[:, j, 0]
        w = traj.outputs[:, j, 1]
        ts_p = settling_time(traj.t, p, t0)
        ts_w = settling_time(traj.t, w, t0)
        worst = max(worst, ts_p, ts_w)
        post = traj.t >= t0
        buses.append({
            "bus": int(bus),
            "settling_time_p": None if math.isinf(ts_p) else ts_p,
            "settling_time_omega": None if math.isinf(ts_w) else ts_w,
            "peak_deviation_p": float(np.max(np.abs(p[post] - p[-1]), initial=0.0)),
            "peak_deviation_omega": float(np.max(np.abs(w[post] - w[-1]), initial=0.0)),
            "undershoot_omega": float(max(0.0, w[-1] - np.min(w[post], initial=w[-1]))),
            "final_p": float(p[-1]),
            "final_omega": float(w[-1]),
        })
    finals = [b["final_omega"] for b in buses]
    return {
        "settled": not math.isinf(worst),
        "settling_time": None if math.isinf(worst) else worst,
        "frequency_spread": float(max(finals) - min(finals)) if finals else 0.0,
        "band": BAND,
        "buses": buses,
        "events": list(traj.events),
        "steps": int(len(traj.t) - 1),
        "rejected_steps": int(traj.rejected),
    }


def replace_disturbance(case, dist):
    return replace(case, simulation=replace(case.simulation, disturbance=dist))
