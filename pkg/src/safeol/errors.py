"""Exception types raised by the engine, oracles and checkers."""


class SafeOLError(Exception):
    pass


class ConfigError(SafeOLError, ValueError):
    pass


class EmptyPessimisticSet(SafeOLError):
    """Internal invariant failure: the initial safe set should always be pessimistic."""


class ModelMismatch(SafeOLError):
    """The version space became empty, so the true constraint is outside the model class."""


class NoSafeAction(SafeOLError):
    pass


class ActionNotOptimistic(SafeOLError, ValueError):
    pass


class EmptyCandidatePool(SafeOLError):
    def __init__(self, resolution):
        super().__init__(
            f"no candidate action of the probe pool (resolution {resolution}) lies in the optimistic set"
        )
        self.resolution = resolution


class GradientTooLarge(SafeOLError, ValueError):
    pass


class NoAwakeAction(SafeOLError, ValueError):
    pass


class SearchBudgetExceeded(SafeOLError):
    def __init__(self, lower_bound, nodes):
        super().__init__(f"search budget exhausted after {nodes} nodes; best length found {lower_bound}")
        self.lower_bound = lower_bound
        self.nodes = nodes


class BoundViolated(SafeOLError, AssertionError):
    def __init__(self, message, rows=None):
        super().__init__(message)
        self.rows = rows or []


class MissingHindsight(SafeOLError, ValueError):
    pass
