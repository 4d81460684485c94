"""Resource-inequality workbench: a symbolic calculus for quantum resource
inequalities backed by exact-enough numerics for the entropic coefficients."""

__version__ = "0.1.0"
