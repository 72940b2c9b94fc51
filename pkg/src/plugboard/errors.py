"""Exception hierarchy shared by every module of the package."""


class CalculusError(Exception):
    """Base class for all user-facing errors."""


class TypeSyntaxError(CalculusError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class LinkError(CalculusError):
    """A link could not be created; carries both endpoints."""

    def __init__(self, message, src=None, dst=None):
        ends = []
        if src is not None:
            ends.append(f"from {_fmt_end(src)}")
        if dst is not None:
            ends.append(f"to {_fmt_end(dst)}")
        super().__init__(message + (f" ({', '.join(ends)})" if ends else ""))
        self.src = src
        self.dst = dst


def _fmt_end(end):
    board, path = end
    return f"{board}/{'.'.join(f'{s}.{i}' for s, i in path)}"


class InvalidPort(LinkError):
    pass


class OrientationError(LinkError):
    pass


class TypeMismatch(LinkError):
    pass


class PortOccupied(LinkError):
    pass


class CycleError(LinkError):
    pass


class SlotNotCompound(CalculusError):
    pass


class SerializationError(CalculusError):
    pass


class ElaborationError(CalculusError):
    pass


class UnresolvedFunctional(ElaborationError):
    pass


class MissingNumeral(ElaborationError):
    pass


class DanglingReceiver(ElaborationError):
    pass


class NonClosedRegion(ElaborationError):
    """A functional argument reaches outside its own socket, so it cannot be copied."""


class InputMismatch(CalculusError):
    pass


class AmbiguousSpacing(CalculusError):
    pass


class RangeError(ValueError):
    pass


class ProgramError(CalculusError):
    """A program could not be read or built; ``line`` is 1-based."""

    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line
