"""Exception types shared across the package."""


class SpaceMismatchError(ValueError):
    """A hypothesis, class, or distribution was used over the wrong atom count."""


class InfeasibleLevelError(ValueError):
    """The feasible subclass at the requested level is empty."""


class BudgetExceededError(RuntimeError):
    """An exhaustive search ran out of its caller-imposed budget.

    Carries the best lower bound established before the budget ran out.
    """

    def __init__(self, message: str, best_lower_bound: int):
        super().__init__(message)
        self.best_lower_bound = best_lower_bound


class PackingError(ValueError):
    """A code packing of the requested size and distance is unreachable."""


class ConstructionError(RuntimeError):
    """An adversarial construction failed its machine-checked postcondition."""


class InapplicableConstructionError(ConstructionError):
    """The instance does not have the structure the construction requires."""
