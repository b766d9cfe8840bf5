"""Exception hierarchy shared by the library and the CLI."""


class DiceError(Exception):
    """Base class for all library errors."""


class InvalidArgument(DiceError, ValueError):
    """An argument violates an operation's precondition."""


class InvalidOneStep(InvalidArgument):
    """A one-step die ``s(a, b)`` violates one of its index constraints."""

    def __init__(self, n: int, up: int, down: int, constraint: str):
        self.n, self.up, self.down, self.constraint = n, up, down, constraint
        super().__init__(f"s({up},{down}) is not a valid one-step die for n={n}: {constraint}")


class ResourceLimitError(DiceError, RuntimeError):
    """A requested computation exceeds its configured work or memory budget."""


class ContractError(DiceError, AssertionError):
    """An internal precondition on a derived quantity does not hold."""
