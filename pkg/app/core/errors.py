"""
Jerarquía de errores del paquete.

Cada error lleva el `status_code` con el que la API lo devuelve; la CLI solo
usa el mensaje y sale con código != 0.
"""


class ThreadStatsError(Exception):
    status_code = 500


class ArgumentError(ThreadStatsError, ValueError):
    status_code = 400


class DomainError(ThreadStatsError, ValueError):
    """Probabilidad fuera de [0, 1] (o NaN)."""
    status_code = 422


class IngestError(ThreadStatsError):
    status_code = 422


class ParseError(IngestError):
    def __init__(self, path, line: int, detail: str):
        self.path, self.line = str(path), line
        super().__init__(f"{path}:{line}: registro mal formado ({detail})")


class DuplicateRecordError(IngestError):
    pass


class ContiguityError(IngestError):
    pass


class InputNotFoundError(IngestError):
    status_code = 404


class WriteError(ThreadStatsError):
    status_code = 500


class EmptyResultError(ThreadStatsError):
    status_code = 422


class UndefinedCurveError(ThreadStatsError):
    status_code = 422


class OracleError(ThreadStatsError):
    status_code = 422
