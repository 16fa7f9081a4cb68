"""Non-autonomous p-adic diffusion on time-dependent graphs."""

from ._ultraheat import (
    Expr,
    NumericalRefusal,
    Scenario,
    UltraheatError,
    ValidationError,
    bound_report,
    evolve,
    heat_kernel,
    load_scenario,
    parse_scenario,
    trotter_sweep,
    validate_markov,
)

__all__ = [
    "Expr",
    "NumericalRefusal",
    "Scenario",
    "UltraheatError",
    "ValidationError",
    "bound_report",
    "evolve",
    "heat_kernel",
    "load_scenario",
    "parse_scenario",
    "trotter_sweep",
    "validate_markov",
]
