"""
Excepciones personalizadas para el análisis de mecanismos de redacción
"""


class ValidationError(Exception):
    """Excepción para errores de validación de entradas"""
    pass


class ChainParseError(ValidationError):
    """Excepción para archivos de cadena mal formados"""

    def __init__(self, message: str, line: int = None, field: str = None):
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"línea {line}")
        if field is not None:
            location.append(f"campo '{field}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class FixtureNotFoundError(ValidationError):
    """Excepción para cadenas de catálogo desconocidas o mal parametrizadas"""
    pass


class ServiceError(Exception):
    """Excepción base para errores de servicios"""
    pass


class DomainError(ServiceError):
    """Excepción para entradas fuera del dominio de una operación"""
    pass


class NumericError(ServiceError):
    """Excepción para fallos numéricos (tolerancias, sistemas singulares)"""
    pass


class ImpossiblePathError(ServiceError):
    """Excepción para condicionamientos de probabilidad cero con masa positiva"""
    pass


class UndefinedConditioningError(ServiceError):
    """Excepción para probabilidades condicionales sobre eventos nulos"""
    pass


class BoundUndefinedError(ServiceError):
    """Excepción para cotas espectrales de cadenas no ergódicas"""
    pass


class EnumerationGuardError(ServiceError):
    """Excepción cuando la enumeración exacta excede el límite configurado"""

    def __init__(self, count: int, guard: int):
        self.count = count
        self.guard = guard
        super().__init__(
            f"La enumeración exacta requiere {count} átomos y el límite es {guard}; "
            f"use el estimador Monte-Carlo (no es una prueba)"
        )
