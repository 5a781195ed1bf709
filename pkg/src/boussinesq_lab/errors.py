"""Exception types shared across the package."""


class NonFiniteFieldError(ValueError):
    def __init__(self, what: str = "field"):
        super().__init__(f"non-finite field ({what})")


class BlowUpError(RuntimeError):
    def __init__(self, t: float, peak: float):
        self.t = t
        self.peak = peak
        super().__init__(f"blow-up detected at t={t:.6g} (max |field| = {peak:.3g})")


class MismatchedGridsError(ValueError):
    def __init__(self):
        super().__init__("mismatched grids")


class PoleError(ArithmeticError):
    """Raised when a Painleve IV solution reaches a pole or a zero of P."""

    def __init__(self, y: float, detail: str = ""):
        self.y = y
        msg = f"pole encountered at y={y:.12g}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ToleranceFailure(RuntimeError):
    pass


class WindowEmptyError(ValueError):
    def __init__(self):
        super().__init__("window empty")


class OutOfRangeError(ValueError):
    pass


class BranchCutError(ValueError):
    def __init__(self, k: complex):
        super().__init__(f"k on branch cut: {k!r}")


class OffRayError(ValueError):
    def __init__(self, ray: int, k: complex):
        super().__init__(f"argument off ray {ray}: k={k!r}")


class ConstraintViolation(ValueError):
    pass


class DegenerateDenominator(ArithmeticError):
    pass
