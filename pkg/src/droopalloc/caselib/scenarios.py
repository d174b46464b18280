"""Bundled three-bus scenarios: three impedance sets times five device mixes."""
from dataclasses import dataclass
from importlib import resources

from ..errors import InvalidArgumentError
from .schema import SCHEMA_VERSION

IMPEDANCES = ("base", "low_impedance", "high_impedance")
MIXES = ("unified-unified", "gfl-gfl", "gfm-gfm", "gfm-gfl", "gfl-gfm")

# (y12, y13, y23) as conductance + j susceptance
LINE_DATA = {
    "base": ((0.0917, -3.0275), (3.4910, -12.7422), (3.4910, -12.7422)),
    "low_impedance": ((0.1387, -4.1620), (4.717, -16.5093), (4.717, -16.5093)),
    "high_impedance": ((0.0736, -2.3787), (2.9626, -10.2552), (2.9626, -10.2552)),
}
P_STAR = (0.8, 0.2)
Q_STAR = 0.25
KP_BOUNDS = (0.0, 1200.0)
NOMINAL_KP = 10.0


@dataclass(frozen=True, order=True)
class ScenarioId:
    name: str
    mix: str

    def __post_init__(self):
        if self.name not in IMPEDANCES:
            raise InvalidArgumentError(f"unknown impedance set {self.name!r}; choose from {IMPEDANCES}")
        if self.mix not in MIXES:
            raise InvalidArgumentError(f"unknown device mix {self.mix!r}; choose from {MIXES}")

    @classmethod
    def parse(cls, text):
        """``"base"`` or ``"low_impedance/gfl-gfm"``; the mix defaults to unified-unified."""
        name, _, mix = text.partition("/")
        return cls(name, mix or "unified-unified")

    def __str__(self):
        return f"{self.name}/{self.mix}"

    @property
    def filename(self):
        return f"{self.name}__{self.mix}.yaml"


def all_ids():
    return [ScenarioId(n, m) for n in IMPEDANCES for m in MIXES]


def builtin(sid):
    """Case document (a plain mapping) for a bundled scenario."""
    if isinstance(sid, str):
        sid = ScenarioId.parse(sid)
    kinds = sid.mix.split("-")
    devices = []
    for bus, (kind, p) in enumerate(zip(kinds, P_STAR), start=1):
        dev = {"bus": bus, "kind": kind, "p_star": p, "q_star": Q_STAR}
        if kind == "unified":
            dev["params"] = {"K_P": NOMINAL_KP}
        devices.append(dev)
    lines = [{"from": a, "to": b, "conductance": g, "susceptance": s}
             for (a, b), (g, s) in zip(((1, 2), (1, 3), (2, 3)), LINE_DATA[sid.name])]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": str(sid),
        "buses": {"count": 3, "slack": 3},
        "slack": {"v_D": 1.0, "v_Q": 0.0},
        "lines": lines,
        "devices": devices,
    }
    n_unified = kinds.count("unified")
    if n_unified:
        doc["optimization"] = {
            "bounds": {"lower": [KP_BOUNDS[0]] * n_unified, "upper": [KP_BOUNDS[1]] * n_unified},
            "epsilon": 1e-6, "starts": 8, "max_outer": 20, "seed": 20240601,
        }
    return doc


def bundled_text(sid):
    """Text of the case file shipped in the package for ``sid``."""
    if isinstance(sid, str):
        sid = ScenarioId.parse(sid)
    return resources.files(__package__).joinpath("cases", sid.filename).read_text(encoding="utf-8")
