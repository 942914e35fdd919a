"""Exception hierarchy shared by every module."""


class SchedError(Exception):
    """Base class for all errors raised by this package."""


class TaskError(SchedError, ValueError):
    def __init__(self, message: str, task_id=None):
        self.task_id = task_id
        if task_id is not None:
            message = f"task {task_id}: {message}"
        super().__init__(message)


class InconsistentFinish(TaskError):
    pass


class DemandOutOfRange(TaskError):
    pass


class NonPositiveField(TaskError):
    pass


class ParseError(SchedError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidSpec(SchedError, ValueError):
    pass


class CapacityViolation(SchedError):
    pass


class EmptyVm(SchedError):
    pass


class NoCandidates(SchedError):
    pass


class PoolExhausted(SchedError):
    """Every VM is awake and none can host the task."""

    def __init__(self, task_id: int, slot: int | None = None, vm_count: int | None = None):
        self.task_id = task_id
        self.slot = slot
        self.vm_count = vm_count
        msg = f"no VM can host task {task_id}"
        if slot is not None:
            msg += f" at slot {slot}"
        if vm_count is not None:
            msg += f" (all {vm_count} VMs awake)"
        super().__init__(msg)


class DatasetMismatch(SchedError, ValueError):
    pass
