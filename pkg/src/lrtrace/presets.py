"""Named parameter sets used by the examples, the CLI and the test-suite."""

from __future__ import annotations

import cmath
import math

from .edge_weights import (
    LogLift,
    PeriodicWeightSystem,
    lift_from_logs,
    lift_logarithms,
    lift_word_from_logs,
    solve_periodic,
)

# b0 of the complete hyperbolic structure on the figure-eight complement
HYPERBOLIC_B0 = cmath.exp(2j * math.pi / 3)

# single-sum term cloud with three petals
PETAL_U = -2.58581 + 6.05389j
PETAL_K_HAT = 5
PETAL_N = 4001

# LR double-sum example (seven petals)
LR_EXAMPLE_LOGS = (-0.0253997 + 34.3024j, -2.58581 - 0.229299j, 5.33887 - 2.45979j)
LR_EXAMPLE_N = 801

# LLR triple-sum example
LLR_EXAMPLE_LOGS = (-0.0223073 + 3.93489j, 0.790951 + 2.38093j, -0.42207 + 0.752766j)
LLR_EXAMPLE_N = 111


def hyperbolic_system(sign="+") -> PeriodicWeightSystem:
    return solve_periodic(HYPERBOLIC_B0, sign)


def hyperbolic_lift(sign="+", base_branches=(0, 0, 0)) -> LogLift:
    """Lift of the hyperbolic system with theta_v = 0 (a0 b0 c0 = 1)."""
    return lift_logarithms(hyperbolic_system(sign), 0j, base_branches)


def lr_example_lift() -> LogLift:
    lift, _ = lift_from_logs(*LR_EXAMPLE_LOGS)
    return lift


def llr_example_lift() -> LogLift:
    return lift_word_from_logs(*LLR_EXAMPLE_LOGS, "LLR")


def principal_V(U: complex) -> complex:
    """Principal V with exp(V) = 1 + exp(U)."""
    return cmath.log(1.0 + cmath.exp(U))
