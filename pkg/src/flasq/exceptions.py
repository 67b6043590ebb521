"""Exception hierarchy for the FLASQ cost model."""

from __future__ import annotations


class FlasqError(Exception):
    """Base class for all errors raised by this package."""


class CircuitValidationError(FlasqError, ValueError):
    """A circuit violates one of its structural invariants."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics[:5])
        more = f" (+{len(self.diagnostics) - 5} more)" if len(self.diagnostics) > 5 else ""
        super().__init__(f"invalid circuit: {lines}{more}")


class InfeasibleCultivation(FlasqError):
    """No tabulated cultivation protocol satisfies the requested error budget."""


class InsufficientQubits(FlasqError):
    """Not enough logical (or physical) qubits to run the circuit."""

    def __init__(self, needed: int, available: int, what: str = "logical qubits"):
        self.needed = needed
        self.available = available
        super().__init__(
            f"insufficient {what}: circuit uses Q={needed} but only N_tot={available} available"
        )


class AboveThreshold(FlasqError, ValueError):
    """Physical error rate at or above the surface code threshold."""


class Infeasible(FlasqError):
    """An optimization found no feasible parameter choice.

    ``reasons`` maps a short constraint name to the number of grid points it rejected.
    """

    def __init__(self, message: str, reasons: dict[str, int] | None = None):
        self.reasons = dict(reasons or {})
        detail = ", ".join(f"{k}: {v}" for k, v in sorted(self.reasons.items()))
        super().__init__(f"{message} ({detail})" if detail else message)


class ConfigError(FlasqError):
    """A run configuration or input file is missing or malformed."""
