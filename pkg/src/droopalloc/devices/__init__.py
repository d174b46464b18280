"""Inverter device models and their equation bookkeeping."""
from dataclasses import dataclass

from .base import COUPLE_D, COUPLE_Q, DC_PIN, DeviceModel, Equation, with_overrides
from .droop import droop_convert, droop_convert_inverse
from .gfl import GflModel, GflParams
from .gfm import VQ_REF, GfmModel, GfmParams
from .unified import UnifiedModel, UnifiedParams

MODELS = {
    "unified": UnifiedModel(),
    "gfl": GflModel(),
    "gfm": GfmModel(),
}

LABELLED_TAGS = {
    "unified": [f"su{i}" for i in range(1, 13)] + [f"au{i}" for i in range(1, 18)],
    "gfl": [f"sl{i}" for i in range(1, 13)] + [f"al{i}" for i in range(1, 15)],
    "gfm": [f"sm{i}" for i in range(1, 12)]
           + ["am1", "am1.5"] + [f"am{i}" for i in range(2, 16)],
}


@dataclass(frozen=True)
class SlackParams:
    """Fixed DQ-frame voltage source providing the angle reference."""

    v_D: float = 1.0
    v_Q: float = 0.0

    def validate(self):
        if not (self.v_D ** 2 + self.v_Q ** 2) > 0:
            raise ValueError("slack voltage magnitude must be positive")


def model_for(kind):
    try:
        return MODELS[kind]
    except KeyError:
        raise ValueError(f"unknown device kind {kind!r}") from None


def default_params(kind, **overrides):
    params = model_for(kind).params_type()
    return with_overrides(params, overrides)


def residuals(kind, x, y, params, boundary=(0.0, 0.0)):
    return model_for(kind).residuals(x, y, params, boundary)


def unified_residuals(x, y, params, boundary=(0.0, 0.0)):
    return MODELS["unified"].residuals(x, y, params, boundary)


def gfl_residuals(x, y, params, boundary=(0.0, 0.0)):
    return MODELS["gfl"].residuals(x, y, params, boundary)


def gfm_residuals(x, y, params, boundary=(0.0, 0.0)):
    return MODELS["gfm"].residuals(x, y, params, boundary)


def equation_map():
    """Rows of ``(kind, tag, f|g, local index, paired variable, labelled?)``."""
    rows = []
    for kind, model in MODELS.items():
        nf = ng = 0
        for eq in model.equations:
            if eq.kind == "f":
                idx, nf = nf, nf + 1
            else:
                idx, ng = ng, ng + 1
            rows.append((kind, eq.tag, eq.kind, idx, eq.solves, eq.labelled))
    return rows


__all__ = [
    "LABELLED_TAGS", "COUPLE_D", "COUPLE_Q", "DC_PIN", "VQ_REF", "DeviceModel",
    "Equation", "GflModel", "GflParams", "GfmModel", "GfmParams", "MODELS",
    "SlackParams", "UnifiedModel", "UnifiedParams", "default_params",
    "droop_convert", "droop_convert_inverse", "equation_map", "gfl_residuals",
    "gfm_residuals", "model_for", "residuals", "unified_residuals",
    "with_overrides",
]
