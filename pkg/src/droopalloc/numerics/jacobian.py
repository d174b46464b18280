"""Jacobian blocks of a DAE by forward-mode AD, with a finite-difference oracle."""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .. import ad
from ..errors import DerivativeError, SingularAlgebraicError

_FD_STEP = np.cbrt(np.finfo(float).eps)
COND_LIMIT = 1e12


@dataclass
class LinearizedSystem:
    Jfx: np.ndarray
    Jfy: np.ndarray
    Jgx: np.ndarray
    Jgy: np.ndarray
    x: np.ndarray
    y: np.ndarray
    kp: np.ndarray = field(default_factory=lambda: np.zeros(0))
    A_eff: np.ndarray | None = None
    cond_gy: float = float("nan")

    @property
    def n(self):
        return self.Jfx.shape[0]

    def stacked(self):
        return np.block([[self.Jfx, self.Jfy], [self.Jgx, self.Jgy]])


def _tangents(values, size):
    out = np.zeros((len(values), size))
    for i, v in enumerate(values):
        if isinstance(v, ad.Dual):
            out[i] = v.der
    return out


def _check_finite(sys, J, n):
    bad = np.argwhere(~np.isfinite(J))
    if bad.size:
        i, j = bad[0]
        rows = list(sys.f_tags) + list(sys.g_tags)
        cols = list(sys.x_labels) + list(sys.y_labels)
        raise DerivativeError(f"non-finite derivative of {rows[i]} with respect to {cols[j]}")


def stacked_jacobian(sys, x, y, kp=None):
    """Residuals ``(F, G)`` and the full ``(n+m)`` square Jacobian at ``(x, y)``."""
    n, m = sys.n, sys.m
    blocks = getattr(sys, "jacobian_blocks", None)
    blocks = blocks(x, y, kp) if blocks else None
    if blocks is not None:
        F, G = sys.residual(x, y, kp)
        J = np.block([[blocks[0], blocks[1]], [blocks[2], blocks[3]]])
        return F, G, J
    z = ad.seed(np.concatenate([x, y]))
    F, G = sys.evaluate(z[:n], z[n:], kp)
    J = _tangents(list(F) + list(G), n + m)
    _check_finite(sys, J, n)
    return (np.array([ad.value(v) for v in F], dtype=float),
            np.array([ad.value(v) for v in G], dtype=float), J)


def _split(J, n):
    return J[:n, :n], J[:n, n:], J[n:, :n], J[n:, n:]


def jacobians(sys, point, kp=None, method="ad"):
    """Four Jacobian blocks at ``point = (x, y)``.

    ``method`` is ``"ad"`` (exact) or ``"fd"`` (central differences).
    """
    x, y = (np.asarray(v, dtype=float) for v in point)
    if method == "ad":
        _, _, J = stacked_jacobian(sys, x, y, kp)
    elif method == "fd":
        J = finite_difference_jacobian(sys, x, y, kp)
    else:
        raise ValueError(f"unknown method {method!r}")
    kp_arr = np.asarray(sys.gains(kp) if hasattr(sys, "gains") else [], dtype=float)
    return LinearizedSystem(*_split(J, sys.n), x=x, y=y, kp=kp_arr)


def finite_difference_jacobian(sys, x, y, kp=None):
    z = np.concatenate([x, y])
    n = sys.n
    J = np.zeros((sys.n + sys.m, z.size))
    for j in range(z.size):
        h = _FD_STEP * max(1.0, abs(z[j]))
        zp, zm = z.copy(), z.copy()
        zp[j] += h
        zm[j] -= h
        rp = np.concatenate(sys.residual(zp[:n], zp[n:], kp))
        rm = np.concatenate(sys.residual(zm[:n], zm[n:], kp))
        J[:, j] = (rp - rm) / (zp[j] - zm[j])
    return J


def jacobian_deviation(sys, point, kp=None):
    """Largest ``|J_ad - J_fd| / max(1, |J_ad|)`` over all entries."""
    x, y = (np.asarray(v, dtype=float) for v in point)
    _, _, Ja = stacked_jacobian(sys, x, y, kp)
    Jf = finite_difference_jacobian(sys, x, y, kp)
    return float(np.max(np.abs(Ja - Jf) / np.maximum(1.0, np.abs(Ja)), initial=0.0))


def gain_jacobians(sys, point, kp, i):
    """Derivatives of the four Jacobian blocks with respect to gain ``i``.

    Uses a dual number whose value is itself a vector-tangent dual, so one
    residual evaluation yields the mixed second derivatives.
    """
    x, y = (np.asarray(v, dtype=float) for v in point)
    n, m = sys.n, sys.m
    size = n + m
    zero = np.zeros(size)
    inner = ad.seed(np.concatenate([x, y]))
    z = [ad.Dual(v, ad.Dual(0.0, zero)) for v in inner]
    gains = [float(k) for k in sys.gains(kp)]
    gains[i] = ad.Dual(ad.Dual(gains[i], zero), ad.Dual(1.0, zero))
    F, G = sys.evaluate(z[:n], z[n:], gains)
    dJ = np.zeros((size, size))
    for r, v in enumerate(list(F) + list(G)):
        if isinstance(v, ad.Dual) and isinstance(v.der, ad.Dual):
            dJ[r] = v.der.der
    _check_finite(sys, dJ, n)
    return _split(dJ, n)


def reduce_effective(lin, cond_limit=COND_LIMIT):
    """Eliminate the algebraic variables: ``Jfx - Jfy Jgy^-1 Jgx``.

    Stores the result and the condition number of ``Jgy`` on ``lin``.
    """
    if lin.Jgy.size == 0:
        lin.A_eff = lin.Jfx.copy()
        lin.cond_gy = 1.0
        return lin.A_eff
    cond = np.linalg.cond(lin.Jgy)
    lin.cond_gy = float(cond)
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularAlgebraicError(
            f"algebraic Jacobian is near-singular (condition number {cond:.3e})")
    lu = scipy.linalg.lu_factor(lin.Jgy)
    Z = scipy.linalg.lu_solve(lu, lin.Jgx)
    lin.A_eff = lin.Jfx - lin.Jfy @ Z
    lin._Z = Z
    lin._lu = lu
    return lin.A_eff


def spectral_abscissa(A):
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return float("-inf")
    return float(np.max(np.linalg.eigvals(A).real))
