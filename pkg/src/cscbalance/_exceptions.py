from typing import Union


class ContractViolation(ValueError):
    """Arguments disagree in length or dimension"""


class DomainError(ValueError):
    """A point or descriptor is not valid for the model"""


class ConfigurationError(ValueError):
    """Points, weights or options do not form a valid configuration"""


class PreconditionError(ValueError):
    """An experiment was started from a base that does not satisfy its hypothesis"""


class DocumentError(ValueError):
    """Malformed or schema-invalid run document

    Attributes:
        key (str | None): offending key, if the error is a schema error
        line, column (int | None): position, if the error is a JSON syntax error
    """

    def __init__(
        self,
        message: str,
        key: Union[str, None] = None,
        line: Union[int, None] = None,
        column: Union[int, None] = None,
    ) -> None:
        super().__init__(message)
        self.key = key
        self.line = line
        self.column = column
