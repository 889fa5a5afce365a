"""
Conductividad compleja de Mattis-Bardeen en el limite de baja temperatura
y baja frecuencia (k_B T << Delta, hbar*omega << Delta).

Incluye:
  - la brecha a T = 0: Delta0 = 1.764 k_B T_c
  - el argumento xi = hbar*omega / (2 k_B T)
  - la densidad termica de cuasiparticulas n_qp(T)
  - las razones sigma1/sigma_n y sigma2/sigma_n

Todo en SI (J, s, Hz, K). Delta se identifica con Delta0 en todas partes
(sin brecha dependiente de T); cerca de T_c/2 eso cambia los resultados en
menos de ~10%.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import constants

from mbres.errores import DomainError, MissingDensityOfStatesError, ValidityWarning
from mbres.specfun import bessel_i0_scaled, sinh_k0

logger = logging.getLogger(__name__)

# --- CONFIGURACION ---

# Razon BCS entre la brecha a T = 0 y k_B T_c
RAZON_BCS = 1.764

# Fraccion de Delta0 por sobre la cual el limite k_BT, hbar*omega << Delta deja de valer
LIMITE_VALIDEZ = 0.5


@dataclass(frozen=True)
class PhysicalConstants:
    """Constantes CODATA (via scipy.constants)."""

    k_B: float = constants.k
    hbar: float = constants.hbar


CONSTANTES = PhysicalConstants()


@dataclass(frozen=True)
class MaterialParams:
    """
    Constantes del superconductor.

    T_c en kelvin, tau0 (tiempo electron-fonon) en segundos. N0 (densidad de
    estados en el nivel de Fermi) es opcional y no tiene valor por defecto:
    debe venir en las mismas unidades de volumen que n_qp, y por energia en J.
    """

    T_c: float
    tau0: float = 30e-9
    N0: Optional[float] = None

    def __post_init__(self):
        if not (np.isfinite(self.T_c) and self.T_c > 0):
            raise DomainError(f"T_c debe ser > 0, se recibio {self.T_c!r}")
        if not (np.isfinite(self.tau0) and self.tau0 > 0):
            raise DomainError(f"tau0 debe ser > 0, se recibio {self.tau0!r}")
        if self.N0 is not None and not (np.isfinite(self.N0) and self.N0 > 0):
            raise DomainError(f"N0 debe ser > 0 cuando se entrega, se recibio {self.N0!r}")

    def requiere_n0(self):
        """Retorna N0 o lanza MissingDensityOfStatesError."""
        if self.N0 is None:
            raise MissingDensityOfStatesError(
                "esta operacion necesita N0 (densidad de estados); agregalo a MaterialParams"
            )
        return self.N0


@dataclass(frozen=True)
class ConductivityRatio:
    """Par (sigma1/sigma_n, sigma2/sigma_n)."""

    s1: float
    s2: float


@dataclass(frozen=True)
class QuasiparticleDensity:
    """Densidad de cuasiparticulas, en las mismas unidades de volumen que N0."""

    n_qp: float

    def __post_init__(self):
        if np.any(np.asarray(self.n_qp) < 0):
            raise DomainError(f"n_qp debe ser >= 0, se recibio {self.n_qp!r}")


def _escalar_o_arreglo(valor, referencia):
    if np.ndim(referencia) == 0 and np.ndim(valor) == 0:
        return float(valor)
    return valor


def _temperatura(T, nombre="T"):
    arr = np.asarray(T, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{nombre} debe ser > 0 y finita, se recibio {T!r}")
    return arr


def gap0(material):
    """Retorna Delta0 = 1.764 k_B T_c en joules."""
    if material.T_c <= 0:
        raise DomainError(f"T_c debe ser > 0, se recibio {material.T_c!r}")
    return RAZON_BCS * CONSTANTES.k_B * material.T_c


def xi(T, f):
    """Retorna xi = hbar*omega / (2 k_B T), con omega = 2*pi*f."""
    arr_T = _temperatura(T)
    f = float(f)
    if not (np.isfinite(f) and f > 0):
        raise DomainError(f"f debe ser > 0, se recibio {f!r}")
    resultado = CONSTANTES.hbar * 2.0 * np.pi * f / (2.0 * CONSTANTES.k_B * arr_T)
    return _escalar_o_arreglo(resultado, T)


def _nqp_sobre_n0(T, delta0):
    """n_qp/N0 termica: 2 sqrt(2 pi k_B T Delta0) exp(-Delta0/k_B T), en joules."""
    kT = CONSTANTES.k_B * T
    return 2.0 * np.sqrt(2.0 * np.pi * kT * delta0) * np.exp(-delta0 / kT)


def nqp_thermal(T, material):
    """
    Densidad termica de cuasiparticulas.

    n_qp = 2 N0 sqrt(2 pi k_B T Delta0) exp(-Delta0 / k_B T)

    Necesita N0. Para T >= T_c la formula no es valida: se entrega igual con
    un ValidityWarning.
    """
    arr_T = _temperatura(T)
    n0 = material.requiere_n0()
    if np.any(arr_T >= material.T_c):
        warnings.warn(
            f"nqp_thermal evaluada en T >= T_c ({material.T_c} K); la formula no es valida ahi",
            ValidityWarning,
            stacklevel=2,
        )
    n = n0 * _nqp_sobre_n0(arr_T, gap0(material))
    return QuasiparticleDensity(_escalar_o_arreglo(n, T))


def _verificar_validez(T, f, delta0):
    hw = CONSTANTES.hbar * 2.0 * np.pi * f
    if hw >= LIMITE_VALIDEZ * delta0:
        warnings.warn(
            f"hbar*omega = {hw / delta0:.3f} Delta0: fuera del limite hbar*omega << Delta",
            ValidityWarning,
            stacklevel=3,
        )
    kT_max = CONSTANTES.k_B * np.max(T)
    if kT_max >= LIMITE_VALIDEZ * delta0:
        warnings.warn(
            f"k_B T = {kT_max / delta0:.3f} Delta0: fuera del limite k_B T << Delta",
            ValidityWarning,
            stacklevel=3,
        )


def s2_zero_temperature(f, material):
    """Valor de sigma2/sigma_n a T = 0: pi Delta0 / (hbar omega)."""
    return np.pi * gap0(material) / (CONSTANTES.hbar * 2.0 * np.pi * float(f))


def sigma_ratio(T, f, material, nqp_override=None):
    """
    Razones sigma1/sigma_n y sigma2/sigma_n.

    sigma1/sigma_n = (2 Delta0/hbar w) n_qp/(N0 sqrt(2 pi k_B T Delta0)) sinh(xi) K0(xi)
    sigma2/sigma_n = (pi Delta0/hbar w) [1 - n_qp/(2 N0 Delta0) (1 + sqrt(2 Delta0/pi k_B T) e^-xi I0(xi))]

    Sin nqp_override se usa la densidad termica; ahi N0 se cancela y el
    resultado depende solo de (T, T_c, f). Con nqp_override (QuasiparticleDensity
    o numero) se necesita N0. Nunca se forma exp(Delta0/k_B T).

    Acepta T escalar o arreglo (se vectoriza sobre T).
    """
    arr_T = _temperatura(T)
    f = float(f)
    if not (np.isfinite(f) and f > 0):
        raise DomainError(f"f debe ser > 0, se recibio {f!r}")
    if np.any(arr_T >= material.T_c):
        raise DomainError(f"sigma_ratio requiere T < T_c = {material.T_c} K, se recibio {T!r}")

    delta0 = gap0(material)
    _verificar_validez(arr_T, f, delta0)

    if nqp_override is None:
        razon = _nqp_sobre_n0(arr_T, delta0)
    else:
        n = nqp_override.n_qp if isinstance(nqp_override, QuasiparticleDensity) else nqp_override
        n = np.asarray(n, dtype=float)
        if np.any(n < 0):
            raise DomainError(f"n_qp debe ser >= 0, se recibio {n!r}")
        razon = n / material.requiere_n0()

    kT = CONSTANTES.k_B * arr_T
    hw = CONSTANTES.hbar * 2.0 * np.pi * f
    x = hw / (2.0 * kT)

    s1 = (2.0 * delta0 / hw) * razon / np.sqrt(2.0 * np.pi * kT * delta0) * sinh_k0(x)
    correccion = razon / (2.0 * delta0) * (1.0 + np.sqrt(2.0 * delta0 / (np.pi * kT)) * bessel_i0_scaled(x))
    s2 = (np.pi * delta0 / hw) * (1.0 - correccion)

    return ConductivityRatio(s1=_escalar_o_arreglo(s1, T), s2=_escalar_o_arreglo(s2, T))
