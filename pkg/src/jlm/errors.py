"""Exception types shared across the package."""


class LatticeError(ValueError):
    pass


class DomainError(ValueError):
    pass


class ExprSyntaxError(ValueError):
    """Malformed expression text; ``offset`` is the 0-based character position."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ExprEvalError(ArithmeticError):
    """Evaluation failure. ``cell`` is set when raised while tabulating a field."""

    def __init__(self, message, cell=None):
        if cell is not None:
            message = f"{message} at cell (n={cell[0]}, m={cell[1]})"
        super().__init__(message)
        self.cell = cell


class ZeroValueError(ArithmeticError):
    """A value that must be nonzero (divisor coefficient, multiplier) is zero."""

    def __init__(self, message, cell):
        super().__init__(f"{message} at cell (n={cell[0]}, m={cell[1]})")
        self.cell = cell


class CompatibilityError(ArithmeticError):
    """The gradient system fails loop closure beyond tolerance."""

    def __init__(self, value, bound, cell):
        super().__init__(
            f"incompatible gradient system: |residual| = {value:.3e} > {bound:.3e} "
            f"at cell (n={cell[0]}, m={cell[1]})"
        )
        self.value = value
        self.bound = bound
        self.cell = cell
