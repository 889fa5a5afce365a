"""
Excepciones y avisos del paquete mbres.

Todas las excepciones heredan de MbresError para que la linea de comandos
pueda atraparlas en un solo lugar y devolver el codigo de salida correcto.
Los avisos (warnings) marcan resultados que se entregan igual pero fuera
del regimen donde el modelo es confiable.
"""


class MbresError(Exception):
    """Base de todos los errores del paquete."""


# --- Errores de dominio ---

class DomainError(MbresError, ValueError):
    """Argumento fuera del dominio de la funcion."""


class MissingDensityOfStatesError(DomainError):
    """Se necesita N0 y no fue entregado."""


class OutOfRangeError(DomainError):
    """El valor a invertir esta fuera del intervalo de busqueda."""


class SamplingError(DomainError):
    """Muestreo demasiado grueso para el filtro del bias-tee."""


class StepSizeError(DomainError):
    """Paso de integracion RK4 demasiado grande."""


# --- Errores de ajuste ---

class FitError(MbresError, RuntimeError):
    """Fallo numerico de un ajuste."""


class DegenerateDataError(FitError):
    """Datos planos o sin estructura que ajustar."""


class SingularJacobianError(FitError):
    """El jacobiano no tiene rango completo en el optimo."""


class InsufficientSpanError(FitError):
    """La traza no cubre suficientes anchos de linea."""


class CircleDegeneracyError(FitError):
    """Los puntos son colineales y no definen un circulo."""


class NoCrossingError(FitError):
    """La curva nunca cruza el nivel de -3 dB en el rango medido."""


# --- Errores de entrada ---

class ConfigError(MbresError, ValueError):
    """Archivo o valor de configuracion invalido."""


class TableError(MbresError, ValueError):
    """CSV mal formado o que no cumple su esquema."""


# =============================================================
# AVISOS
# =============================================================

class ValidityWarning(UserWarning):
    """Evaluacion fuera del limite k_B T << Delta, hbar*omega << Delta."""


class OverflowGuardWarning(UserWarning):
    """El resultado desborda y se reemplaza por +inf."""


class SmallSignalWarning(UserWarning):
    """Modulacion demasiado profunda para el modelo linealizado."""


class PulseWindowWarning(UserWarning):
    """Pulso de gate fuera de la ventana segura para el bias-tee."""


class FitRangeWarning(UserWarning):
    """Rango de datos demasiado corto para un ajuste confiable."""
