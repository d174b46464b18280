"""Per-bus GFM/GFL leaning derived from optimal droop gains."""
from dataclasses import dataclass, field

import numpy as np

from ..devices.droop import droop_convert
from ..errors import InvalidArgumentError

BAND = 0.01
GFL_LEANING = "GFL-leaning"
GFM_LEANING = "GFM-leaning"
MIXED = "mixed"

HEURISTIC_NOTE = (
    "heuristic: a gain more than 1% above the reference suggests grid-following "
    "resources at that bus, more than 1% below suggests grid-forming resources")


@dataclass
class BusAllocation:
    bus: int
    gain: float
    reference: float
    percent_droop: float | None
    relative_change: float
    label: str


@dataclass
class AllocationReport:
    buses: list
    band: float = BAND
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "band": self.band,
            "notes": list(self.notes),
            "buses": [{"bus": b.bus, "gain": b.gain, "reference_gain": b.reference,
                       "percent_droop": b.percent_droop,
                       "relative_change": b.relative_change, "label": b.label}
                      for b in self.buses],
        }

    def table(self):
        lines = [f"{'bus':>4} {'gain':>12} {'reference':>12} {'change':>9} {'w-P %':>9}  label"]
        for b in self.buses:
            pct = "inf" if b.percent_droop is None else f"{b.percent_droop:.5f}"
            lines.append(f"{b.bus:>4} {b.gain:>12.3f} {b.reference:>12.3f} "
                         f"{100 * b.relative_change:>8.3f}% {pct:>9}  {b.label}")
        return "\n".join(lines + [""] + list(self.notes))


def label_for(gain, reference, band=BAND):
    if reference <= 0:
        raise InvalidArgumentError("reference gain must be positive")
    rel = (gain - reference) / reference
    if rel > band:
        return GFL_LEANING, rel
    if rel < -band:
        return GFM_LEANING, rel
    return MIXED, rel


def classify(gains, reference, buses, band=BAND, notes=()):
    """Compare optimal gains against a reference (usually the base-case) set."""
    if reference is None:
        raise InvalidArgumentError("a reference gain set is required")
    gains = np.asarray(gains, float)
    reference = np.asarray(reference, float)
    if gains.shape != reference.shape or len(buses) != gains.size:
        raise InvalidArgumentError("gains, reference and buses must have matching lengths")
    out = []
    for bus, k, r in zip(buses, gains, reference):
        label, rel = label_for(float(k), float(r), band)
        pct = droop_convert(float(k)) if k > 0 else None
        out.append(BusAllocation(int(bus), float(k), float(r), pct, float(rel), label))
    return AllocationReport(out, band, [HEURISTIC_NOTE, *notes])


def classify_result(result, reference_result, buses):
    if not result.converged:
        raise InvalidArgumentError("result did not converge")
    return classify(result.gains, reference_result.gains, buses,
                    notes=[f"reference: {reference_result.case_name}"])
