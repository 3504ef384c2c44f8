"""Exception types raised by the placement library."""


class RelayError(Exception):
    """Base class for every error raised by uavrelay."""


class ConfigError(RelayError, ValueError):
    """Scenario or channel parameters violate their invariants."""


class NonPositiveDistance(RelayError, ValueError):
    pass


class InvalidPosition(RelayError, ValueError):
    pass


class AltitudeOutOfRange(InvalidPosition):
    pass


class HorizontalOutOfRange(InvalidPosition):
    pass


class CoverageMismatch(RelayError, ValueError):
    """Hop distances do not sum to the Tx-Rx distance."""


class SpacingViolation(RelayError, ValueError):
    """An inter-UAV hop is shorter than the minimum spacing."""


class EmptyChain(RelayError, ValueError):
    pass


class DegenerateLeadingCoefficient(RelayError, ArithmeticError):
    """Polynomial has no usable coefficients (identically zero)."""


class SingularPrefix(RelayError, ArithmeticError):
    """Mid-hop stationary point requested where the prefix sits under the MSI."""


class InfeasibleGamma(RelayError):
    """Target SIR cannot be met.

    ``term`` names the binding constraint when known (``"tx_hop"``,
    ``"uav_hop"``, ``"rx_hop"`` or ``"spacing"``).
    """

    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class NegativeRadicand(InfeasibleGamma):
    pass


class InfeasibleGeometry(RelayError):
    pass


class NoBracket(RelayError, ValueError):
    pass


class Infeasible(RelayError):
    """Raised by the lattice oracle when no chain exists."""


class RejectionOverflow(RelayError):
    pass
