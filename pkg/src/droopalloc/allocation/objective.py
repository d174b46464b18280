"""Lyapunov-trace objective, its adjoint gradient, and the frozen-equilibrium problem."""
import warnings

import numpy as np
import scipy.linalg

from ..errors import InfeasibleError, InstabilityError
from ..numerics.jacobian import gain_jacobians, jacobians, reduce_effective
from ..numerics.lyapunov import ConditioningWarning, certify, default_weights, lyapunov_solve


def objective(A, Q=None, S=None):
    """``Trace(P S)`` with ``A^T P + P A = -Q``; returns ``(value, certificate)``.

    Raises :class:`InstabilityError` when ``A`` is not Hurwitz.
    """
    cert = certify(A, Q, S)
    return cert.objective, cert


def gradient(A, dA, P, S):
    """Derivative of ``Trace(P S)`` along each matrix in ``dA``.

    One adjoint solve ``A M + M A^T = -S`` serves every direction.
    """
    A = np.asarray(A, dtype=float)
    with warnings.catch_warnings():
        # the adjoint only feeds a search direction, not a certificate
        warnings.simplefilter("ignore", ConditioningWarning)
        M = lyapunov_solve(A.T, np.asarray(S, dtype=float))
    return np.array([float(np.sum((D.T @ P + P @ D) * M.T)) for D in dA])


class FrozenProblem:
    """Effective matrix as a function of the droop gains at a fixed equilibrium.

    The Jacobian blocks are affine in the gains (they enter the residuals
    linearly), so they are stored as a base value plus one derivative per
    gain.  The affinity is checked against a direct evaluation; if it fails
    the blocks are re-evaluated at every query instead.
    """

    def __init__(self, sys, x, y, Q=None, S=None, kp_ref=None):
        self.sys = sys
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        Qd, Sd = default_weights(sys.n)
        self.Q = Qd if Q is None else np.asarray(Q, dtype=float)
        self.S = Sd if S is None else np.asarray(S, dtype=float)
        k = sys.n_gains
        kp_ref = np.asarray(sys.nominal_gains if kp_ref is None else kp_ref, dtype=float)
        self.kp_ref = kp_ref
        base = jacobians(sys, (self.x, self.y), kp_ref)
        self._dJ = [gain_jacobians(sys, (self.x, self.y), kp_ref, i) for i in range(k)]
        self._J0 = [blk - sum(kp_ref[i] * d[b] for i, d in enumerate(self._dJ))
                    for b, blk in enumerate((base.Jfx, base.Jfy, base.Jgx, base.Jgy))]
        self.affine = self._check_affine(kp_ref)

    def _check_affine(self, kp_ref):
        probe = kp_ref + 1.0 + 0.37 * np.arange(len(kp_ref))
        direct = jacobians(self.sys, (self.x, self.y), probe)
        for got, want in zip(self._blocks_affine(probe), (direct.Jfx, direct.Jfy, direct.Jgx, direct.Jgy)):
            if not np.allclose(got, want, rtol=1e-10, atol=1e-10):
                return False
        return True

    def _blocks_affine(self, kp):
        return [J0 + sum(kp[i] * d[b] for i, d in enumerate(self._dJ))
                for b, J0 in enumerate(self._J0)]

    def _blocks(self, kp):
        if self.affine:
            return self._blocks_affine(kp), self._dJ
        lin = jacobians(self.sys, (self.x, self.y), kp)
        dJ = [gain_jacobians(self.sys, (self.x, self.y), kp, i) for i in range(len(kp))]
        return [lin.Jfx, lin.Jfy, lin.Jgx, lin.Jgy], dJ

    def linearized(self, kp):
        from ..numerics.jacobian import LinearizedSystem
        (Jfx, Jfy, Jgx, Jgy), dJ = self._blocks(np.asarray(kp, dtype=float))
        lin = LinearizedSystem(Jfx, Jfy, Jgx, Jgy, self.x, self.y, np.asarray(kp, dtype=float))
        reduce_effective(lin)
        return lin, dJ

    def effective(self, kp):
        return self.linearized(kp)[0].A_eff

    def effective_derivatives(self, lin, dJ):
        """``dA_eff/dK_i`` by the product rule through the Schur complement."""
        Z, lu = lin._Z, lin._lu
        out = []
        for dJfx, dJfy, dJgx, dJgy in dJ:
            # d(Jgy^-1 Jgx) = Jgy^-1 (dJgx - dJgy Z)
            dZ = scipy.linalg.lu_solve(lu, dJgx - dJgy @ Z)
            out.append(dJfx - dJfy @ Z - lin.Jfy @ dZ)
        return out

    def evaluate(self, kp, with_gradient=True):
        """``(value, gradient or None, certificate)``; raises on instability."""
        lin, dJ = self.linearized(kp)
        value, cert = objective(lin.A_eff, self.Q, self.S)
        if not with_gradient:
            return value, None, cert
        dA = self.effective_derivatives(lin, dJ)
        return value, gradient(lin.A_eff, dA, cert.P, self.S), cert

    def value(self, kp):
        """Objective, or ``None`` off the stable set."""
        try:
            return self.evaluate(kp, with_gradient=False)[0]
        except InstabilityError:
            return None

    def spectral_abscissa(self, kp):
        A = self.effective(kp)
        return float(np.max(np.linalg.eigvals(A).real))


__all__ = ["FrozenProblem", "InfeasibleError", "gradient", "objective"]
