"""Exception hierarchy for labourflow."""


class LabourflowError(Exception):
    """Base class for all labourflow errors."""

    exit_code = 1


class InputError(LabourflowError, ValueError):
    """Malformed or inconsistent input data."""

    exit_code = 2


class ConstraintError(LabourflowError, RuntimeError):
    """A structural constraint could not be satisfied (connectivity, digests)."""

    exit_code = 3


class SimulationFault(LabourflowError, RuntimeError):
    """Internal inconsistency detected while simulating."""

    exit_code = 4
