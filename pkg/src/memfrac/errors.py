"""Exception types shared across the package."""


class MemfracError(Exception):
    """Base class for all library errors."""


class DomainError(MemfracError, ValueError):
    """An argument lies outside the domain an evaluation supports."""


class AxiomError(DomainError):
    """A weight distribution violates one of the memory-operator axioms."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class NoKnownPairing(MemfracError):
    """No closed-form paired variable V is known for the given weight."""


class AccuracyError(MemfracError):
    """A truncated series did not reach its tolerance within the term cap."""

    def __init__(self, message, partial=None, terms=None):
        super().__init__(message)
        self.partial = partial
        self.terms = terms


class DivergenceError(MemfracError):
    """An iterative solver failed to contract or produced non-finite values."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SingularityError(DivergenceError):
    """An ODE reduction hit a vanishing denominator."""


class BracketError(MemfracError):
    """A root-finding bracket contains no sign change."""


class ParseError(MemfracError, ValueError):
    """A command-line specification string could not be parsed."""

    def __init__(self, message, text="", position=0):
        super().__init__(f"{message} (at position {position} in {text!r})")
        self.text = text
        self.position = position
