"""Common machinery for device residual models."""
import math
from dataclasses import dataclass, fields, replace

from .. import ad
from ..errors import InvalidArgumentError

# auxiliary rows that close each device's algebraic set
COUPLE_D = "couple_D"
COUPLE_Q = "couple_Q"
DC_PIN = "dc_pin"


@dataclass(frozen=True)
class Equation:
    tag: str
    kind: str  # "f" or "g"
    solves: str  # variable this row is paired with in the bookkeeping
    labelled: bool = True


class DeviceModel:
    """Residual model of one inverter kind.

    Subclasses define ``kind``, ``states``, ``algebraics``, ``equations``,
    ``params_type`` and implement :meth:`_residuals` and :meth:`flat_start`.
    ``vc_global`` names the two variables holding the bus voltage in the DQ
    frame as ``(("x"|"y", name), ("x"|"y", name))``.
    """

    kind = ""
    states = ()
    algebraics = ()
    equations = ()
    params_type = None
    vc_global = ()
    ig_global = ("igD", "igQ")
    power = ("y", "p")
    omega = ("y", "w")
    droop_param = None

    @property
    def n(self):
        return len(self.states)

    @property
    def m(self):
        return len(self.algebraics)

    def f_tags(self):
        return [e.tag for e in self.equations if e.kind == "f"]

    def g_tags(self):
        return [e.tag for e in self.equations if e.kind == "g"]

    def residuals(self, x, y, p, boundary=(0.0, 0.0)):
        """Return ``(f, g)`` lists for states ``x``, algebraics ``y``.

        ``boundary`` is the network-side (D, Q) current injection at this
        bus, matched by the two coupling rows at the end of ``g``.
        """
        if len(x) != self.n or len(y) != self.m:
            raise InvalidArgumentError(
                f"{self.kind}: expected {self.n} states and {self.m} algebraics, "
                f"got {len(x)} and {len(y)}")
        for v in (*x, *y, *boundary):
            if not math.isfinite(ad.value(v)):
                raise InvalidArgumentError(f"{self.kind}: non-finite input")
        f, g = self._residuals(x, y, p)
        iD, iQ = (_var(self, x, y, ("y", n)) for n in self.ig_global)
        g.append(iD - boundary[0])
        g.append(iQ - boundary[1])
        return f, g

    def _residuals(self, x, y, p):
        raise NotImplementedError

    def flat_start(self, p):
        raise NotImplementedError

    def bus_voltage(self, x, y):
        return tuple(_var(self, x, y, ref) for ref in self.vc_global)

    def output(self, x, y, which):
        return _var(self, x, y, getattr(self, which))

    def index(self, where, name):
        names = self.states if where == "x" else self.algebraics
        return names.index(name)


def _var(model, x, y, ref):
    where, name = ref
    return x[model.index("x", name)] if where == "x" else y[model.index("y", name)]


def with_overrides(params, overrides):
    """Return a copy of a params dataclass with keys from ``overrides`` applied."""
    names = {f.name for f in fields(params)}
    unknown = set(overrides) - names
    if unknown:
        raise InvalidArgumentError(f"unknown parameter(s) {sorted(unknown)}")
    return replace(params, **overrides)


def check_positive(params, names):
    for name in names:
        v = getattr(params, name)
        if not (math.isfinite(v) and v > 0):
            raise InvalidArgumentError(f"parameter {name} must be positive, got {v}")
