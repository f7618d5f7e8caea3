from typing import Optional


class MMTError(Exception):
    """Base class of every error raised by mmtsuite."""


class ValidationError(MMTError, ValueError):
    """A boundary, network, layout or permutation violates its invariants."""


class DomainError(MMTError, ValueError):
    """A multiplicity lies outside the box a cost is defined on."""


class PreconditionError(MMTError, ValueError):
    """An operation was called on inputs it does not accept (axioms, dimensions)."""


class ResourceLimitError(MMTError):
    """An enumeration would exceed one of the limits in :mod:`mmtsuite.constants`."""


class LPError(MMTError):
    """A linear program that must be solvable was not."""


class InstanceFormatError(MMTError, ValueError):
    """
    Malformed instance document.

    :param message:  What went wrong.
    :param position: JSON path (``$.boundary[1].weight``) or ``line:column`` of the offending value.
    """

    def __init__(self, message: str, position: Optional[str] = None) -> None:
        self.position = position
        super().__init__(f"{message} (at {position})" if position else message)
