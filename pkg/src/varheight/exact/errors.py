class DomainError(ValueError):
    """Input outside the mathematical domain of an operation (x = 0, zero polynomial, ...)."""


class NotCoprimeError(DomainError):
    """Raised when a tuple of polynomials shares a nontrivial common factor."""

    def __init__(self, gcd):
        self.gcd = gcd
        super().__init__(f"not coprime: {gcd}")
