"""Exception hierarchy shared by all advkit modules."""


class AdvkitError(Exception):
    """Base class for all toolkit errors."""


class InputError(AdvkitError, ValueError):
    """A caller-supplied argument violates a documented precondition."""


class DomainError(InputError):
    """An input point lies outside the domain of the function at hand."""


class ResourceError(AdvkitError):
    """A size or enumeration cap would be exceeded; the request is refused."""


class InternalCheckError(AdvkitError):
    """An internal invariant that must hold by construction failed."""
