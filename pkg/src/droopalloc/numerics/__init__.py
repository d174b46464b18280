"""Equilibrium, linearisation, Lyapunov certification and time integration."""
from .equilibrium import NewtonReport, newton_equilibrium, stacked_residual
from .integrate import Event, Trajectory, energy_integral, integrate, trajectory_csv
from .jacobian import (LinearizedSystem, finite_difference_jacobian, gain_jacobians,
                       jacobian_deviation, jacobians, reduce_effective,
                       spectral_abscissa, stacked_jacobian)
from .lyapunov import (ConditioningWarning, LyapunovCertificate, certify, default_weights,
                       is_spd, lyapunov_residual, lyapunov_solve)
from .system import FunctionalDae, LinearDae

__all__ = [
    "ConditioningWarning", "Event", "FunctionalDae", "LinearDae", "LinearizedSystem",
    "LyapunovCertificate", "NewtonReport", "Trajectory", "certify", "default_weights",
    "energy_integral", "finite_difference_jacobian", "gain_jacobians", "integrate",
    "is_spd", "jacobian_deviation", "jacobians", "lyapunov_residual", "lyapunov_solve",
    "newton_equilibrium", "reduce_effective", "spectral_abscissa", "stacked_jacobian",
    "stacked_residual",
]
