"""Exception hierarchy.

Every failure that a caller may want to react to has its own class; the CLI
maps them onto exit codes.
"""


class IsocrystalError(Exception):
    """Base class for all library errors."""


class InsufficientPrecision(IsocrystalError):
    """A discrete decision could not be certified at the working precision."""


class DivisionByUncertain(IsocrystalError, ZeroDivisionError):
    """Division by an element whose valuation is not known."""


class LengthMismatch(IsocrystalError, ValueError):
    pass


class NotDiagonalizableAtPrecision(IsocrystalError):
    """The slope decomposition does not split over the working level."""


class RelationFails(IsocrystalError):
    """A monodromy operator violates N.phi = q.phi.N or is not nilpotent."""


class DominanceFails(IsocrystalError):
    """The requested Hodge type does not dominate the Newton vector."""

    def __init__(self, mu, nu):
        super().__init__(f"type {mu} does not dominate Newton vector {nu}")
        self.mu = mu
        self.nu = nu


class RetriesExhausted(IsocrystalError):
    """Random construction failed on every retry."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConstructionRetryExhausted(RetriesExhausted):
    pass


class NoConvergence(IsocrystalError):
    """Adapted-lattice iteration did not reach a fixpoint.

    ``drift`` lists the valuation of the covolume after each step.
    """

    def __init__(self, iterations, drift, reason="iteration budget exhausted"):
        super().__init__(f"no fixpoint after {iterations} steps ({reason})")
        self.iterations = iterations
        self.drift = list(drift)
        self.reason = reason


class NotStronglyDivisible(IsocrystalError):
    pass


class ConditionIFailsError(IsocrystalError):
    """t_H differs from t_N on the whole space."""

    def __init__(self, t_H, t_N):
        super().__init__(f"t_H = {t_H} differs from t_N = {t_N}")
        self.t_H = t_H
        self.t_N = t_N


class SchemaError(IsocrystalError, ValueError):
    """Malformed input document."""
