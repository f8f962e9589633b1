"""Exception types shared across the package."""


class RejectedInput(ValueError):
    """An argument violates a documented precondition (shape, sign, range)."""


class ConfigError(ValueError):
    """A simulation config is malformed or references unknown names."""


class GainConditionError(ConfigError):
    """Design gains break the stability conditions required by the update laws."""


class NumericBlowup(ArithmeticError):
    """A non-finite value appeared during simulation.

    ``t`` is the simulation time and ``index`` (when known) the 1-based
    backstepping step or state component where it surfaced.
    """

    def __init__(self, message, t=None, index=None):
        super().__init__(message)
        self.t = t
        self.index = index

    def __str__(self):
        base = super().__str__()
        where = []
        if self.t is not None:
            where.append(f"t={self.t:.6g}")
        if self.index is not None:
            where.append(f"index={self.index}")
        return f"{base} ({', '.join(where)})" if where else base
