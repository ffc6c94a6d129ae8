"""Exception types raised across the package."""


class SpinLBError(Exception):
    """Base class for all package errors."""


class MalformedMonomialError(SpinLBError, ValueError):
    """A monomial repeats a site index or uses a non-positive one."""


class CapacityError(SpinLBError):
    """A requested size exceeds a configured enumeration or matrix cap."""


class ContractViolationError(SpinLBError, ValueError):
    """An input breaks an operation's precondition (e.g. non-Hermitian matrix)."""


class InternalConsistencyError(SpinLBError):
    """A self-check failed; usually points at a reduction-rule bug."""


class DegeneratePointError(SpinLBError, FloatingPointError):
    """The objective was evaluated where tr(tau^2) vanishes."""
