"""Exception hierarchy shared by every module of the package."""


class TreeDerivError(Exception):
    """Base class for all domain errors raised by treederiv."""


class ArityMismatch(TreeDerivError):
    pass


class DuplicateIndex(TreeDerivError):
    pass


class UnknownSymbol(TreeDerivError):
    pass


class InvalidExpression(TreeDerivError):
    """Raised when an expression fails the validity predicate.

    ``violations`` holds one :class:`~treederiv.expressions.Violation` per
    offending subexpression.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid expression: {lines}")


class NonInjectiveMap(TreeDerivError):
    pass


class IndexNotPresent(TreeDerivError):
    pass


class MissingIndices(TreeDerivError):
    pass


class NonNullaryExpression(TreeDerivError):
    pass


class ParseError(TreeDerivError):
    """Syntax, arity or validity error located at a span of the input text."""

    def __init__(self, message, span=None, text=None):
        self.message = message
        self.span = span
        self.text = text
        super().__init__(self._render())

    def _render(self):
        if self.span is None:
            return self.message
        where = f"at {self.span.start}..{self.span.end}"
        if self.text is None:
            return f"{self.message} ({where})"
        caret = " " * self.span.start + "^" * max(1, self.span.end - self.span.start)
        return f"{self.message} ({where})\n  {self.text}\n  {caret}"
