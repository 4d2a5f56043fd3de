class ParameterError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ShapeError(ValueError):
    """Arrays or images whose sizes do not agree."""


class ProtocolError(RuntimeError):
    """Oracle responses that no faithful MPPS instance could have produced."""
