# core/errors.py


class RomError(Exception):
    """Base class for every error raised by the reduced-order pipeline."""

    exit_code = 3


class ArgumentError(RomError, ValueError):
    """Invalid argument, violated precondition or dimension mismatch."""


class NumericDomainError(RomError, ArithmeticError):
    """A computation produced a non-finite intermediate value."""


class SolverError(RomError):
    """Linear solve failed or violated the residual contract."""

    def __init__(self, message, condition=None, residual=None):
        super().__init__(message)
        self.condition = condition
        self.residual = residual


class ConfigurationError(RomError):
    """Experiment configuration is invalid or inconsistent."""

    exit_code = 2


class MeasureError(RomError):
    """An error measure is undefined for the given inputs."""


class ArchiveError(RomError):
    """A WROM archive is malformed, truncated or has an unknown version."""


class ProvenanceError(ArchiveError):
    """A WROM archive was produced under a different configuration."""

    def __init__(self, message, expected=None, found=None):
        super().__init__(message)
        self.expected = expected
        self.found = found


class TrainingError(RomError):
    """Surrogate training diverged."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class SnapshotError(RomError):
    """A high-fidelity solve failed while assembling snapshots."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class TaskError(RomError):
    """A task executed by the TaskManager raised."""

    def __init__(self, message, task_id=None, index=None, cause=None):
        super().__init__(message)
        self.task_id = task_id
        self.index = index
        self.cause = cause


class StageError(RomError):
    """A pipeline stage aborted."""

    def __init__(self, stage, cause):
        super().__init__(f"Stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 3)
