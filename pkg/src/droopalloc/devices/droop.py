"""Conversion between unified P-omega droop and GFM omega-P droop."""
import math

from ..errors import InvalidArgumentError


def droop_convert(k_unified):
    """Per-unit P-omega gain to the equivalent omega-P percentage.

    A pure grid-following device has zero P-omega droop and no finite
    omega-P equivalent, so ``k_unified <= 0`` is rejected.
    """
    if not math.isfinite(k_unified) or k_unified <= 0:
        raise InvalidArgumentError(
            f"P-omega droop must be positive to convert, got {k_unified}")
    return 100.0 / k_unified


def droop_convert_inverse(percent):
    if not math.isfinite(percent) or percent <= 0:
        raise InvalidArgumentError(
            f"omega-P droop percentage must be positive, got {percent}")
    return 100.0 / percent
