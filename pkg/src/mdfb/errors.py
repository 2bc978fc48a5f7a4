"""Exception hierarchy shared by every module."""


class MdfbError(Exception):
    """Base class for all package errors."""


class ParameterError(MdfbError, ValueError):
    """A parameter lies outside its valid domain."""


class NumericalError(MdfbError, ArithmeticError):
    """A numeric routine failed (quadrature, finite differences, root finding).

    The failing module and operation are recorded so experiment runners can
    report them without a traceback.
    """

    def __init__(self, module, operation, message):
        self.module = module
        self.operation = operation
        super().__init__(f"{module}.{operation}: {message}")


class ConsistencyError(MdfbError, RuntimeError):
    """A simulation produced an outcome its model forbids."""
