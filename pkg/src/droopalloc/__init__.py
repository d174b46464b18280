"""Optimal P-omega droop allocation for inverter-based networks."""
__version__ = "0.1.0"
