"""Exception hierarchy shared by the engine, strategies and tools."""


class GameError(Exception):
    """Base class for every error raised by this package."""


class InvalidConfig(GameError, ValueError):
    pass


class IllegalMove(GameError, ValueError):
    """A claim that the board cannot accept (claimed, duplicate or out of range)."""

    def __init__(self, message, edge=None):
        super().__init__(message)
        self.edge = edge


class AlreadyClaimed(IllegalMove):
    pass


class StrategyViolation(GameError):
    """A strategy returned a move that breaks the round rules.

    ``transcript`` holds every round completed before the offending move, so
    the failure can be inspected and audited.
    """

    def __init__(self, message, round_no=None, player=None, transcript=None):
        super().__init__(message)
        self.round_no = round_no
        self.player = player
        self.transcript = transcript


class BoardExhausted(GameError):
    pass


class TheoremViolation(GameError):
    """Raised when a position contradicts a proven guarantee."""


class BiasInfeasible(GameError):
    def __init__(self, message, remainders=()):
        super().__init__(message)
        self.remainders = tuple(remainders)


class InvalidCertificate(GameError, ValueError):
    pass


class Unsupported(GameError):
    pass
