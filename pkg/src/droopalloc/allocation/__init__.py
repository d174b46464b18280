"""Droop-gain optimisation and allocation guidance."""
from .objective import FrozenProblem, gradient, objective
from .optimize import (InnerResult, StartRecord, grid_certify, grid_scan, inner_optimize,
                       projected_descent, start_points)
from .outer import (Iterate, OptimizationResult, outer_iterate, residual_check,
                    seed_equilibrium)
from .report import (BAND, GFL_LEANING, GFM_LEANING, MIXED, AllocationReport, BusAllocation,
                     classify, classify_result, label_for)
from .sweep import evaluate_point, parse_param_path, parse_range, sweep

__all__ = [
    "AllocationReport", "BAND", "BusAllocation", "FrozenProblem", "GFL_LEANING",
    "GFM_LEANING", "InnerResult", "Iterate", "MIXED", "OptimizationResult", "StartRecord",
    "classify", "classify_result", "gradient", "grid_certify", "grid_scan",
    "inner_optimize", "label_for", "objective", "outer_iterate", "projected_descent",
    "evaluate_point", "parse_param_path", "parse_range", "residual_check", "seed_equilibrium",
    "start_points", "sweep",
]
