"""Forward-mode algorithmic differentiation with dual numbers.

A :class:`Dual` carries a value and a tangent.  The tangent may be a float,
a numpy vector (many directions at once) or another :class:`Dual`, so
nesting a vector-tangent dual inside a scalar-tangent dual yields mixed
second derivatives.  Residual code is written with ordinary arithmetic
plus :func:`sin`, :func:`cos` and :func:`sqrt` from this module, and works
unchanged on plain floats.
"""
import math

import numpy as np

__all__ = ["Dual", "sin", "cos", "sqrt", "value", "tangent", "seed"]


class Dual:
    __slots__ = ("val", "der")
    # keep numpy scalars from swallowing a Dual into an object array
    __array_ufunc__ = None

    def __init__(self, val, der):
        self.val = val
        self.der = der

    def __repr__(self):
        return f"Dual({self.val!r}, {self.der!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.der + other.der)
        return Dual(self.val + other, self.der)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.der - other.der)
        return Dual(self.val - other, self.der)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.der)

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val,
                        self.der * other.val + self.val * other.der)
        return Dual(self.val * other, self.der * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = 1.0 / other.val
            return Dual(self.val * inv,
                        (self.der - self.val * inv * other.der) * inv)
        return Dual(self.val / other, self.der * (1.0 / other))

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        return Dual(other * inv, -other * inv * inv * self.der)

    def __pow__(self, n):
        if isinstance(n, Dual):
            raise TypeError("Dual exponent not supported")
        return Dual(self.val ** n, n * self.val ** (n - 1) * self.der)

    # comparisons act on the primal value only
    def __lt__(self, other):
        return value(self) < value(other)

    def __gt__(self, other):
        return value(self) > value(other)

    def __le__(self, other):
        return value(self) <= value(other)

    def __ge__(self, other):
        return value(self) >= value(other)

    def __float__(self):
        return float(value(self))


def value(a):
    """Primal value, unwrapping nested duals."""
    while isinstance(a, Dual):
        a = a.val
    return a


def tangent(a, size):
    """First-level tangent of ``a`` as a length-``size`` float vector."""
    if isinstance(a, Dual):
        return np.asarray(value_array(a.der), dtype=float).reshape(size)
    return np.zeros(size)


def value_array(d):
    if isinstance(d, Dual):
        return value(d)
    return d


def seed(values, offset=0, size=None):
    """Wrap ``values`` as duals with one-hot vector tangents.

    Entry ``k`` gets the unit tangent ``e_{offset+k}`` of length ``size``.
    """
    values = [float(v) for v in values]
    size = len(values) if size is None else size
    out = []
    for k, v in enumerate(values):
        d = np.zeros(size)
        d[offset + k] = 1.0
        out.append(Dual(v, d))
    return out


def sin(a):
    if isinstance(a, Dual):
        return Dual(sin(a.val), cos(a.val) * a.der)
    return math.sin(a)


def cos(a):
    if isinstance(a, Dual):
        return Dual(cos(a.val), -sin(a.val) * a.der)
    return math.cos(a)


def sqrt(a):
    if isinstance(a, Dual):
        r = sqrt(a.val)
        return Dual(r, a.der * (0.5 / r))
    return math.sqrt(a)
