"""Continuous Lyapunov equation ``A^T P + P A = -Q`` by Schur reduction."""
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.linalg.lapack import dtrsyl

from ..errors import InstabilityError


class ConditioningWarning(UserWarning):
    pass


@dataclass
class LyapunovCertificate:
    P: np.ndarray
    Q: np.ndarray
    S: np.ndarray
    lyap_residual: float
    objective: float
    spectral_abscissa: float
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {
            "objective": self.objective,
            "lyap_residual": self.lyap_residual,
            "spectral_abscissa": self.spectral_abscissa,
            "warnings": list(self.warnings),
        }


def _solve(A, Q):
    T, U = scipy.linalg.schur(A, output="real")
    eig = _schur_eigs(T)
    sa = float(eig.real.max(initial=-np.inf))
    if not sa < 0:
        raise InstabilityError(f"matrix is not Hurwitz (spectral abscissa {sa:.6g})", eig)
    C = -(U.T @ Q @ U)
    X, scale, info = dtrsyl(T, T, C, trana="T", tranb="N", isgn=1)
    if info < 0:
        raise ValueError(f"dtrsyl argument {-info} invalid")
    notes = []
    if info == 1 or scale < 1.0:
        notes.append(f"Schur back-substitution rescaled (scale {scale:.3e})")
    P = U @ (X / scale) @ U.T
    return 0.5 * (P + P.T), sa, eig, notes


def _schur_eigs(T):
    n = T.shape[0]
    out = []
    i = 0
    while i < n:
        if i + 1 < n and T[i + 1, i] != 0.0:
            out.extend(np.linalg.eigvals(T[i:i + 2, i:i + 2]))
            i += 2
        else:
            out.append(T[i, i])
            i += 1
    return np.asarray(out, dtype=complex)


def lyapunov_residual(A, P, Q):
    return float(np.linalg.norm(A.T @ P + P @ A + Q, "fro"))


def lyapunov_solve(A, Q, return_notes=False):
    """Symmetric ``P`` with ``A^T P + P A = -Q`` for Hurwitz ``A``.

    Raises :class:`InstabilityError` carrying the eigenvalues when ``A`` is
    not Hurwitz.  Emits :class:`ConditioningWarning` if the back-substitution
    had to rescale or the residual exceeds ``1e-8 ||Q||_F``.
    """
    A = np.asarray(A, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or Q.shape != A.shape:
        raise ValueError(f"shape mismatch: A {A.shape}, Q {Q.shape}")
    if A.shape[0] == 0:
        P, notes = np.zeros((0, 0)), []
    else:
        P, _, _, notes = _solve(A, Q)
        r = lyapunov_residual(A, P, Q)
        if r > 1e-8 * np.linalg.norm(Q, "fro"):
            notes.append(f"Lyapunov residual {r:.3e} above 1e-8 ||Q||")
        try:
            np.linalg.cholesky(P)
        except np.linalg.LinAlgError:
            notes.append("solution failed the positive-definiteness check")
    for note in notes:
        warnings.warn(note, ConditioningWarning, stacklevel=2)
    return (P, notes) if return_notes else P


def default_weights(n):
    """``Q = I`` and ``S = I / (2n)``."""
    return np.eye(n), np.eye(n) / (2 * max(n, 1))


def certify(A, Q=None, S=None):
    """Solve the Lyapunov equation and package the trace objective."""
    A = np.asarray(A, dtype=float)
    Qd, Sd = default_weights(A.shape[0])
    Q = Qd if Q is None else np.asarray(Q, dtype=float)
    S = Sd if S is None else np.asarray(S, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        P, notes = lyapunov_solve(A, Q, return_notes=True)
    sa = float(np.max(np.linalg.eigvals(A).real)) if A.size else float("-inf")
    return LyapunovCertificate(P=P, Q=Q, S=S, lyap_residual=lyapunov_residual(A, P, Q),
                               objective=float(np.trace(P @ S)), spectral_abscissa=sa,
                               warnings=notes)


def is_spd(M, tol=0.0):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or not np.allclose(M, M.T, atol=1e-12):
        return False
    try:
        np.linalg.cholesky(M - tol * np.eye(M.shape[0]))
        return True
    except np.linalg.LinAlgError:
        return False
