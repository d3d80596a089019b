"""
Clases de excepción personalizadas para el modulo twinfock.
"""


class TwinFockError(Exception):
    """Excepción base del proyecto."""


class PhotonRangeError(TwinFockError, ValueError):
    """Excepción para valores fuera del rango admitido (topes de fotones, cortes, N efectivo nulo)."""


class InvalidStateError(TwinFockError, ValueError):
    """Excepción para estados |m::m'> no validos."""


class InvalidLossError(TwinFockError, ValueError):
    """Excepción para tasas de perdida o fases no validas."""


class CriterionError(TwinFockError):
    """Excepción para estados que no cumplen el criterio de superar el limite de ruido shot."""


class UsageError(TwinFockError):
    """Excepción para peticiones mal formadas (nombres, rejillas, candidatos, argumentos)."""


class NumericalInvariantError(TwinFockError):
    """Excepción para invariantes numericos violados durante el calculo."""
