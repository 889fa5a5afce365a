"""
Funciones especiales para las expresiones de Mattis-Bardeen.

Solo se exponen las formas escaladas: e^(-x) I0(x), e^x K0(x) y el producto
sinh(x) K0(x). A temperaturas de milikelvin el argumento xi = hbar*omega/2k_BT
supera facilmente 700, donde I0 y K0 por separado desbordan o se anulan.

Las evaluaciones usan scipy.special.i0e / k0e (expansiones de Chebyshev de
Cephes en [0, 8] y forma asintotica por encima), con error relativo del
orden de 1e-15 en todo el rango util.
"""

import numpy as np
from scipy import special

from mbres.errores import DomainError


def _validar_argumento(x, nombre):
    """Convierte a arreglo y rechaza x <= 0 o valores no finitos."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{nombre}: el argumento debe ser finito, se recibio {x!r}")
    if np.any(arr <= 0):
        raise DomainError(f"{nombre}: el argumento debe ser > 0, se recibio {x!r}")
    return arr


def _como_entrada(resultado, x):
    # Escalar entra, escalar sale
    if np.ndim(x) == 0:
        return float(resultado)
    return resultado


def bessel_i0_scaled(x):
    """
    Retorna e^(-x) * I0(x) para x > 0.

    Tiende a 1 cuando x -> 0 y a 1/sqrt(2*pi*x) cuando x -> infinito.
    """
    arr = _validar_argumento(x, "bessel_i0_scaled")
    return _como_entrada(special.i0e(arr), x)


def bessel_k0_scaled(x):
    """Retorna e^x * K0(x) para x > 0."""
    arr = _validar_argumento(x, "bessel_k0_scaled")
    return _como_entrada(special.k0e(arr), x)


def sinh_k0(x):
    """
    Retorna sinh(x) * K0(x) sin formar sinh ni K0 por separado.

    Usa sinh(x) K0(x) = (1 - e^(-2x))/2 * [e^x K0(x)], identidad exacta para
    todo x > 0. El factor (1 - e^(-2x)) se evalua con expm1 para no perder
    digitos cuando x -> 0.
    """
    arr = _validar_argumento(x, "sinh_k0")
    resultado = -np.expm1(-2.0 * arr) / 2.0 * special.k0e(arr)
    return _como_entrada(resultado, x)
