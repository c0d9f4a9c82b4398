"""Exception types shared across the package."""

from __future__ import annotations


class ValidationError(ValueError):
    """An input violates a structural invariant.

    ``violations`` holds one human-readable string per broken invariant.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class PreconditionError(ValueError):
    """An operation's precondition failed; ``nodes`` names the offenders."""

    def __init__(self, message: str, nodes: list[int] | None = None):
        self.nodes = list(nodes) if nodes is not None else []
        super().__init__(message if not self.nodes else f"{message} (nodes {self.nodes})")


class DegenerateInputError(ValueError):
    """Input is structurally valid but degenerate for the requested transform."""


class StarReductionError(RuntimeError):
    """No terminal pair produced a hub value satisfying the fixed-point equation.

    ``hub_residuals`` maps each tried terminal pair to the hub residual it produced.
    """

    def __init__(self, hub_residuals: dict[tuple[int, int], float]):
        self.hub_residuals = dict(hub_residuals)
        super().__init__(
            "no terminal pair passed the hub fixed-point check: "
            + ", ".join(f"{p}: {r:.3e}" for p, r in self.hub_residuals.items())
        )


class EstimateUndefinedError(RuntimeError):
    """Every simulated episode was truncated; the sample mean is meaningless."""

    def __init__(self, truncated_fraction: float = 1.0):
        self.truncated_fraction = truncated_fraction
        super().__init__(
            f"all episodes truncated (truncated_fraction={truncated_fraction}); "
            "no terminated sample to average"
        )
