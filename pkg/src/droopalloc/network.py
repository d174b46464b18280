"""Static line model and assembly of the full network DAE."""
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import ad
from .devices import MODELS, SlackParams, model_for
from .errors import CaseValidationError, InvalidArgumentError
from .frames import GLOBAL, Phasor2


@dataclass(frozen=True)
class LineAdmittance:
    from_bus: int
    to_bus: int
    y: complex

    def __post_init__(self):
        if self.from_bus == self.to_bus:
            raise CaseValidationError("lines", f"line {self.from_bus}-{self.to_bus} is a self-loop")
        if not (math.isfinite(self.y.real) and math.isfinite(self.y.imag)):
            raise CaseValidationError("lines", "non-finite admittance")


@dataclass(frozen=True)
class DeviceSpec:
    bus: int
    kind: str
    params: object


@dataclass(frozen=True)
class OptimizationSettings:
    kp_lower: tuple = ()
    kp_upper: tuple = ()
    epsilon: float = 1e-6
    starts: int = 8
    max_outer: int = 20
    seed: int = 20240601
    # None selects Q = I and S = I/(2n)
    Q: object = None
    S: object = None


@dataclass(frozen=True)
class Disturbance:
    bus: int = 1
    param: str = "p_star"
    delta: float = 0.1
    time: float = 0.1


@dataclass(frozen=True)
class SimulationSettings:
    horizon: float = 5.0
    tol: float = 1e-6
    h_min: float = 1e-5
    h_max: float = 1e-2
    disturbance: Disturbance = field(default_factory=Disturbance)


@dataclass(frozen=True)
class NetworkCase:
    """Buses are numbered from 1; ``devices`` lists one entry per non-slack bus."""

    n_buses: int
    slack_bus: int
    lines: tuple
    devices: tuple
    slack: SlackParams = field(default_factory=SlackParams)
    optimization: OptimizationSettings = field(default_factory=OptimizationSettings)
    simulation: SimulationSettings = field(default_factory=SimulationSettings)
    name: str = ""

    @property
    def n_ibr(self):
        return len(self.devices)

    def unified_devices(self):
        return [d for d in self.devices if d.kind == "unified"]

    def nominal_gains(self):
        return np.array([d.params.K_P for d in self.unified_devices()], dtype=float)

    def bounds(self):
        n = len(self.unified_devices())
        lo = np.asarray(self.optimization.kp_lower, dtype=float)
        hi = np.asarray(self.optimization.kp_upper, dtype=float)
        if lo.size == 0:
            lo = np.zeros(n)
        if hi.size == 0:
            hi = np.full(n, np.inf)
        return lo, hi

    def with_gains(self, gains):
        gains = list(gains)
        devices = []
        for d in self.devices:
            if d.kind == "unified":
                devices.append(replace(d, params=replace(d.params, K_P=float(gains.pop(0)))))
            else:
                devices.append(d)
        return replace(self, devices=tuple(devices))

    def validate(self):
        if self.n_buses < 1:
            raise CaseValidationError("buses.count", "need at least one bus")
        if not 1 <= self.slack_bus <= self.n_buses:
            raise CaseValidationError("buses.slack", f"slack bus {self.slack_bus} out of range")
        seen = set()
        for i, d in enumerate(self.devices):
            path = f"devices[{i}]"
            if d.kind not in MODELS:
                raise CaseValidationError(f"{path}.kind", f"unknown device kind {d.kind!r}")
            if not 1 <= d.bus <= self.n_buses:
                raise CaseValidationError(f"{path}.bus", f"bus {d.bus} does not exist")
            if d.bus == self.slack_bus:
                raise CaseValidationError(f"{path}.bus", "the slack bus cannot host a device")
            if d.bus in seen:
                raise CaseValidationError(f"{path}.bus", f"bus {d.bus} has two devices")
            seen.add(d.bus)
            try:
                d.params.validate()
            except ValueError as exc:
                raise CaseValidationError(f"{path}.params", str(exc)) from None
        missing = set(range(1, self.n_buses + 1)) - seen - {self.slack_bus}
        if missing:
            raise CaseValidationError("devices", f"buses {sorted(missing)} have no device")
        for i, ln in enumerate(self.lines):
            for end in (ln.from_bus, ln.to_bus):
                if not 1 <= end <= self.n_buses:
                    raise CaseValidationError(f"lines[{i}]", f"bus {end} does not exist")
        lo, hi = self.bounds()
        n = len(self.unified_devices())
        if lo.size != n or hi.size != n:
            raise CaseValidationError("optimization.bounds",
                                      f"expected {n} bounds per side, got {lo.size} and {hi.size}")
        if np.any(lo < 0) or np.any(lo > hi):
            raise CaseValidationError("optimization.bounds", "need 0 <= lower <= upper")
        try:
            self.slack.validate()
        except ValueError as exc:
            raise CaseValidationError("slack", str(exc)) from None


def merge_lines(lines):
    """Sum admittances of parallel lines; orientation does not matter."""
    merged = {}
    for ln in lines:
        key = (min(ln.from_bus, ln.to_bus), max(ln.from_bus, ln.to_bus))
        merged[key] = merged.get(key, 0j) + ln.y
    return [LineAdmittance(a, b, y) for (a, b), y in sorted(merged.items())]


def _incidence(lines, n_buses):
    inc = [[] for _ in range(n_buses)]
    for ln in merge_lines(lines):
        a, b = ln.from_bus - 1, ln.to_bus - 1
        inc[a].append((b, ln.y.real, ln.y.imag))
        inc[b].append((a, ln.y.real, ln.y.imag))
    return inc


def _inject(k, vD, vQ, inc):
    iD = iQ = 0.0
    for l, G, B in inc[k]:
        dD = vD[k] - vD[l]
        dQ = vQ[k] - vQ[l]
        iD = iD + G * dD - B * dQ
        iQ = iQ + G * dQ + B * dD
    return iD, iQ


def line_injection(bus, voltages, lines):
    """Current injected from ``bus`` (1-based) into the incident lines.

    ``voltages`` holds one global-frame :class:`Phasor2` or ``(D, Q)`` pair
    per bus.
    """
    n = len(voltages)
    if not 1 <= bus <= n:
        raise InvalidArgumentError(f"bus {bus} out of range 1..{n}")
    vD, vQ = [], []
    for v in voltages:
        if isinstance(v, Phasor2):
            if v.frame != GLOBAL:
                raise InvalidArgumentError("bus voltages must be in the global frame")
            vD.append(v.d)
            vQ.append(v.q)
        else:
            vD.append(v[0])
            vQ.append(v[1])
    iD, iQ = _inject(bus - 1, vD, vQ, _incidence(lines, n))
    return Phasor2(iD, iQ, GLOBAL)


@dataclass
class _Component:
    bus: int
    kind: str
    model: object
    params: object
    xs: slice
    ys: slice
    gain_index: int  # position in the K_P vector, -1 if not a decision variable


class DaeSystem:
    """Stacked residuals ``F(x, y, K_P)`` and ``G(x, y, K_P)`` of a network.

    The algebraic set of every device includes its two current-coupling
    rows, so ``m`` counts network coupling as well.
    """

    def __init__(self, case):
        self.case = case
        self.components = []
        n = m = 0
        k = 0
        for d in case.devices:
            model = model_for(d.kind)
            gi = -1
            if d.kind == "unified":
                gi, k = k, k + 1
            self.components.append(_Component(d.bus, d.kind, model, d.params,
                                              slice(n, n + model.n), slice(m, m + model.m), gi))
            n += model.n
            m += model.m
        self.n, self.m, self.n_gains = n, m, k
        self._inc = _incidence(case.lines, case.n_buses)
        self.x_labels = [f"bus{c.bus}.{c.kind}.{s}" for c in self.components for s in c.model.states]
        self.y_labels = [f"bus{c.bus}.{c.kind}.{s}" for c in self.components for s in c.model.algebraics]
        self.f_tags = [f"bus{c.bus}.{t}" for c in self.components for t in c.model.f_tags()]
        self.g_tags = [f"bus{c.bus}.{t}" for c in self.components for t in c.model.g_tags()]
        self.nominal_gains = case.nominal_gains()

    def __repr__(self):
        return f"DaeSystem(n={self.n}, m={self.m}, gains={self.n_gains})"

    @property
    def time_scale(self):
        """Model time units per second.

        Unified equations run in seconds.  GFL and GFM equations carry no
        base frequency, so a network made only of those runs in per-unit
        time and one second is ``2*pi*60`` units.
        """
        kinds = {c.kind for c in self.components}
        if kinds and "unified" not in kinds:
            return 120.0 * math.pi
        return 1.0

    def index_map(self):
        """Mapping of every label to ``("x"|"y", global position)``."""
        out = {lab: ("x", i) for i, lab in enumerate(self.x_labels)}
        out.update({lab: ("y", i) for i, lab in enumerate(self.y_labels)})
        return out

    def gains(self, kp=None):
        return self.nominal_gains if kp is None else kp

    def evaluate(self, x, y, kp=None):
        """Residual lists for scalar or dual-number inputs."""
        kp = self.gains(kp)
        case = self.case
        vD = [0.0] * case.n_buses
        vQ = [0.0] * case.n_buses
        vD[case.slack_bus - 1] = case.slack.v_D
        vQ[case.slack_bus - 1] = case.slack.v_Q
        parts = []
        for c in self.components:
            xd, yd = x[c.xs], y[c.ys]
            vD[c.bus - 1], vQ[c.bus - 1] = c.model.bus_voltage(xd, yd)
            parts.append((xd, yd))
        F, G = [], []
        for c, (xd, yd) in zip(self.components, parts):
            params = c.params
            if c.gain_index >= 0:
                params = replace(params, K_P=kp[c.gain_index])
            boundary = _inject(c.bus - 1, vD, vQ, self._inc)
            f, g = c.model.residuals(xd, yd, params, boundary)
            F.extend(f)
            G.extend(g)
        return F, G

    def residual(self, x, y, kp=None):
        F, G = self.evaluate(list(map(float, x)), list(map(float, y)), kp)
        return np.array(F, dtype=float), np.array(G, dtype=float)

    def stacked(self, z, kp=None):
        F, G = self.residual(z[:self.n], z[self.n:], kp)
        return np.concatenate([F, G])

    def flat_start(self):
        x, y = [], []
        for c in self.components:
            xd, yd = c.model.flat_start(c.params)
            x.extend(xd)
            y.extend(yd)
        return np.array(x, dtype=float), np.array(y, dtype=float)

    def outputs(self, x, y):
        """Per-device ``(bus, p, omega, |v_c|)`` tuples."""
        out = []
        for c in self.components:
            xd, yd = list(x[c.xs]), list(y[c.ys])
            p = c.model.output(xd, yd, "power")
            w = c.model.output(xd, yd, "omega")
            vD, vQ = c.model.bus_voltage(xd, yd)
            out.append((c.bus, float(p), float(w), math.hypot(vD, vQ)))
        return out

    def with_param(self, bus, name, value):
        """New system with one device parameter replaced."""
        devices = []
        for d in self.case.devices:
            if d.bus == bus:
                d = replace(d, params=replace(d.params, **{name: value}))
            devices.append(d)
        return assemble(replace(self.case, devices=tuple(devices)))

    def bookkeeping(self):
        """Dimension summary and the tag of every residual row."""
        return {
            "n": self.n,
            "m": self.m,
            "gains": self.n_gains,
            "devices": [{"bus": c.bus, "kind": c.kind, "n": c.model.n, "m": c.model.m}
                        for c in self.components],
            "f": list(self.f_tags),
            "g": list(self.g_tags),
        }


def assemble(case):
    case.validate()
    return DaeSystem(case)
