"""Exception types shared across the package."""


class SimulationDiverged(RuntimeError):
    """A state left the model's validity region (non-finite or rotor stalled)."""


class UndefinedEstimate(RuntimeError):
    """An estimator's defining ratio is degenerate (e.g. zero ROCOF denominator)."""


class RankDeficientFit(RuntimeError):
    """A least-squares problem has no unique solution (unidentifiable data)."""


class TraceFormatError(ValueError):
    """A trace or report file does not match the expected schema."""
