from typing import Any


class JetbraneError(Exception):
    def __init__(self, msg: str) -> None:
        super().__init__(msg)
        self.msg = msg


class SchemaError(JetbraneError):
    def __init__(self, msg: str, name: Any = None) -> None:
        super().__init__(msg)
        self.name = name


class InhomogeneityError(JetbraneError):
    def __init__(self, msg: str, first: Any, second: Any) -> None:
        super().__init__(msg)
        self.first = first
        self.second = second


class SubstitutionError(JetbraneError):
    def __init__(self, msg: str, generator: Any) -> None:
        super().__init__(msg)
        self.generator = generator


class IndexMismatchError(JetbraneError):
    def __init__(self, msg: str, left: Any, right: Any) -> None:
        super().__init__(msg)
        self.left = left
        self.right = right


class ConfigurationError(JetbraneError):
    pass


class PreconditionError(JetbraneError):
    pass


class InternalConsistencyError(JetbraneError):
    pass


class NeedsHigherOrder(JetbraneError):
    def __init__(self, msg: str, residual: Any) -> None:
        super().__init__(msg)
        self.residual = residual


class TheoryValidationError(JetbraneError):
    def __init__(self, msg: str, check: str) -> None:
        super().__init__(msg)
        self.check = check


class DSLSyntaxError(JetbraneError):
    def __init__(
        self,
        msg: str,
        line: int,
        column: int,
        expected: frozenset[str] = frozenset(),
    ) -> None:
        super().__init__(msg)
        self.line = line
        self.column = column
        self.expected = expected

    def __str__(self) -> str:
        text = f"line {self.line}, column {self.column}: {self.msg}"
        if self.expected:
            text += f" (expected one of: {', '.join(sorted(self.expected))})"
        return text


class DSLSemanticError(JetbraneError):
    def __init__(self, msg: str, line: int, column: int) -> None:
        super().__init__(msg)
        self.line = line
        self.column = column

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.msg}"
