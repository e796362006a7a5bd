"""Exception hierarchy shared across the package.

Validation findings are data (see :mod:`iasdo.validator`); exceptions are
reserved for contract violations: unknown names, rejected runtime actions,
malformed scripts.
"""

from __future__ import annotations


class IasdoError(Exception):
    """Base class for all package errors."""


class UnknownClassError(IasdoError):
    """A class name does not resolve against the model."""


class UnknownProcessError(IasdoError):
    """A process name does not resolve against the model."""


class UnknownRoleError(IasdoError):
    """A role name does not resolve against the model."""


class UnknownObjectError(IasdoError):
    """An object id does not exist in the world."""


class UnknownAtomError(IasdoError):
    """A condition atom's class is missing from the binding map."""


class MultipleRootsError(IasdoError):
    """A specialisation component has zero or several root classes."""


class PrivilegeError(IasdoError):
    """The acting role lacks the privilege the action requires."""


class MigrationRejected(IasdoError):
    """Object migration violates the declared state-change order."""


class InactiveMembershipError(IasdoError):
    """Update attempted on an inactive class membership."""


class DependencyError(IasdoError):
    """An existential dependency is unsatisfied or would be dangled."""


class AttributeAccessError(IasdoError):
    """Attribute is not part of the class's effective access view."""


class LoopError(IasdoError):
    """Loop re-entry requested where no declared loop applies."""


class ScriptError(IasdoError):
    """A trace script line cannot be parsed or addresses unknown entities."""

    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
