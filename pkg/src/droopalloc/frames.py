"""Rotations between a device's local dq-frame and the network DQ-frame."""
import math
from dataclasses import dataclass

import numpy as np

from . import ad
from .errors import FrameError, InvalidArgumentError

LOCAL = "local"
GLOBAL = "global"

# per-unit speed of the network DQ-frame
OMEGA_DQ = 1.0


def _check_angle(theta):
    if not math.isfinite(ad.value(theta)):
        raise InvalidArgumentError(f"non-finite angle {theta!r}")


def rotation(theta):
    """Return the 2x2 matrix rotating local dq coordinates into DQ by ``theta``."""
    _check_angle(theta)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class Phasor2:
    """A (d, q) or (D, Q) pair tagged with the frame it is expressed in."""

    d: float
    q: float
    frame: str = LOCAL

    def __post_init__(self):
        if self.frame not in (LOCAL, GLOBAL):
            raise InvalidArgumentError(f"unknown frame tag {self.frame!r}")
        if not (math.isfinite(ad.value(self.d)) and math.isfinite(ad.value(self.q))):
            raise InvalidArgumentError("non-finite phasor component")

    def as_array(self):
        return np.array([self.d, self.q], dtype=float)

    def norm(self):
        return math.hypot(self.d, self.q)

    def complex(self):
        return complex(self.d, self.q)


def rotate(d, q, theta):
    """Rotate the pair (d, q) by ``theta``; works on floats and duals."""
    c, s = ad.cos(theta), ad.sin(theta)
    return d * c - q * s, d * s + q * c


def to_global(local, theta):
    if local.frame != LOCAL:
        raise FrameError(f"to_global expects a local phasor, got {local.frame!r}")
    _check_angle(theta)
    d, q = rotate(local.d, local.q, theta)
    return Phasor2(d, q, GLOBAL)


def to_local(glob, theta):
    if glob.frame != GLOBAL:
        raise FrameError(f"to_local expects a global phasor, got {glob.frame!r}")
    _check_angle(theta)
    d, q = rotate(glob.d, glob.q, -theta)
    return Phasor2(d, q, LOCAL)


def wrap_angle(theta):
    """Wrap to (-pi, pi] for display; states themselves stay unwrapped."""
    w = math.remainder(theta, 2.0 * math.pi)
    return math.pi if w == -math.pi else w
