"""Exception hierarchy shared by every module."""


class LoopError(Exception):
    """Base class for all loopkit errors."""


class SizeMismatch(LoopError):
    pass


class IndexOutOfRange(LoopError):
    pass


class NotLatin(LoopError):
    def __init__(self, kind: str, index: int, value: int):
        self.kind = kind
        self.index = index
        self.value = value
        super().__init__(f"{kind} {index} repeats value {value}")


class NoIdentity(LoopError):
    pass


class InversesDisagree(LoopError):
    def __init__(self, element: int, left: int, right: int):
        self.element = element
        self.left = left
        self.right = right
        super().__init__(
            f"left inverse {left} != right inverse {right} for element {element}")


class ParseError(LoopError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at position {position}{detail}")


class UnboundSigmaSlot(LoopError):
    pass


class BudgetExceeded(LoopError):
    """Exhaustive evaluation would exceed the assignment budget."""


class NotAutotopism(LoopError):
    pass


class NotRIP(LoopError):
    pass


class NotAutomorphism(LoopError):
    pass


class NotClosed(LoopError):
    pass


class OrderTooLarge(LoopError):
    pass


class MissingParameter(LoopError):
    pass


class NotPrime(LoopError):
    pass


class AxiomViolation(LoopError):
    pass


class PreconditionFailed(LoopError):
    def __init__(self, identity: str, detail: str = ""):
        self.identity = identity
        self.detail = detail
        super().__init__(f"precondition failed: {identity}" + (f" ({detail})" if detail else ""))


class NotGenBol(PreconditionFailed):
    def __init__(self, detail: str = ""):
        super().__init__("gen-right-bol", detail)


class FormatError(LoopError):
    pass
