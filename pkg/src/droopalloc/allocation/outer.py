"""Alternating gain optimisation and equilibrium recomputation."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import SeedInstabilityError
from ..network import assemble
from ..numerics.equilibrium import newton_equilibrium, stacked_residual
from ..numerics.jacobian import jacobians, reduce_effective
from .objective import FrozenProblem
from .optimize import inner_optimize


@dataclass
class Iterate:
    k: int
    gains: np.ndarray
    residual: float
    objective: float
    spectral_abscissa: float
    x: np.ndarray
    y: np.ndarray

    def to_dict(self, sys):
        return {
            "k": self.k,
            "gains": [float(v) for v in self.gains],
            "residual": self.residual,
            "objective": self.objective,
            "spectral_abscissa": self.spectral_abscissa,
            "equilibrium": {
                "x": dict(zip(sys.x_labels, map(float, self.x))),
                "y": dict(zip(sys.y_labels, map(float, self.y))),
            },
        }


@dataclass
class OptimizationResult:
    iterations: list
    converged: bool
    gains: np.ndarray
    certificate: object
    nominal_gains: np.ndarray
    seed_residual: float
    x: np.ndarray
    y: np.ndarray
    epsilon: float
    inner: list = field(default_factory=list)
    case_name: str = ""

    @property
    def residuals(self):
        return [it.residual for it in self.iterations]

    def to_dict(self, sys):
        return {
            "case": self.case_name,
            "converged": self.converged,
            "epsilon": self.epsilon,
            "nominal_gains": [float(v) for v in self.nominal_gains],
            "seed_residual": self.seed_residual,
            "gains": [float(v) for v in self.gains],
            "certificate": self.certificate.to_dict(),
            "iterations": [it.to_dict(sys) for it in self.iterations],
        }


def residual_check(sys, previous, gains, epsilon=1e-6):
    """Residual of the stored equilibrium under new gains; ``(R, R <= epsilon)``."""
    R = stacked_residual(sys, previous[0], previous[1], np.asarray(gains, float))
    return R, R <= epsilon


def seed_equilibrium(sys, gains):
    """Flat-start equilibrium at ``gains``; rejects an unstable seed."""
    rep = newton_equilibrium(sys, sys.flat_start(), gains)
    lin = jacobians(sys, (rep.x, rep.y), gains)
    A = reduce_effective(lin)
    eig = np.linalg.eigvals(A)
    if not np.max(eig.real) < 0:
        raise SeedInstabilityError(
            f"equilibrium at the nominal gains is unstable (spectral abscissa {np.max(eig.real):.4g})",
            eig)
    return rep


def outer_iterate(case, nominal=None, epsilon=None, max_outer=None, starts=None, seed=None,
                  Q=None, S=None):
    """Run the alternating scheme and return an :class:`OptimizationResult`.

    Each pass optimises the gains at the frozen equilibrium, evaluates the
    old equilibrium under the new gains, and re-solves the equilibrium when
    that residual exceeds ``epsilon``.  Hitting ``max_outer`` gives a
    non-converged result rather than an exception.
    """
    opt = case.optimization
    epsilon = opt.epsilon if epsilon is None else epsilon
    max_outer = opt.max_outer if max_outer is None else max_outer
    starts = opt.starts if starts is None else starts
    seed = opt.seed if seed is None else seed
    Q = opt.Q if Q is None else Q
    S = opt.S if S is None else S
    sys = assemble(case)
    lower, upper = case.bounds()
    gains = case.nominal_gains() if nominal is None else np.asarray(nominal, float)
    nominal_gains = gains.copy()
    rep = seed_equilibrium(sys, gains)
    x, y = rep.x, rep.y
    iterations, inner = [], []
    converged = False
    for k in range(1, max_outer + 1):
        problem = FrozenProblem(sys, x, y, Q, S, kp_ref=gains)
        res = inner_optimize(problem, lower, upper, nominal=gains, starts=starts, seed=seed)
        inner.append(res)
        R, ok = residual_check(sys, (x, y), res.gains, epsilon)
        iterations.append(Iterate(k, res.gains.copy(), R, res.objective,
                                  res.certificate.spectral_abscissa, x.copy(), y.copy()))
        gains = res.gains
        if ok:
            converged = True
            break
        rep = newton_equilibrium(sys, (x, y), gains)
        x, y = rep.x, rep.y
    final = FrozenProblem(sys, x, y, Q, S, kp_ref=gains).evaluate(gains, with_gradient=False)[2]
    return OptimizationResult(iterations, converged, gains, final, nominal_gains, rep.residual,
                              x, y, epsilon, inner, case.name)
