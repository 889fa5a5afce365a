"""
Modelo directo e inverso del resonador.

  - freq_shift / loss_shift: de temperatura a dff = df/f y dinvQ = d(1/Q_i)
  - effective_temperature: de una perdida medida a la temperatura efectiva
  - predict_freq_from_loss: la curva predicha de dff a partir de dinvQ
  - tiempos de recombinacion de cuasiparticulas (caso termico y generico)

Los desplazamientos se miden respecto de un estado de referencia T_ref
(por defecto 10 mK, la temperatura base del criostato) y los denominadores
sigma2 se evaluan en T_ref.
"""

import logging
import math
import warnings
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from mbres.errores import DomainError, OutOfRangeError, OverflowGuardWarning, ValidityWarning
from mbres.mattis_bardeen import CONSTANTES, LIMITE_VALIDEZ, gap0, sigma_ratio

logger = logging.getLogger(__name__)

# --- CONFIGURACION ---

# Temperatura base del criostato, usada como referencia de los desplazamientos
T_REF_DEFECTO = 0.010

# Techo del intervalo de busqueda de T_eff, como fraccion de T_c
TECHO_BUSQUEDA = 0.95

# Tolerancia absoluta de la biseccion (kelvin)
TOLERANCIA_T = 1e-14

# Mayor exponente que cabe en un float64
LOG_MAXIMO = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class ResonatorBaseline:
    """
    Resonador sin perturbar: f_res0 (Hz), Q_i0, Q_c y la razon de
    participacion alpha de la inductancia cinetica afectada por el gate.
    """

    f_res0: float
    Q_i0: float
    Q_c: float
    alpha: float

    def __post_init__(self):
        for nombre in ("f_res0", "Q_i0", "Q_c"):
            valor = getattr(self, nombre)
            if not (np.isfinite(valor) and valor > 0):
                raise DomainError(f"{nombre} debe ser > 0, se recibio {valor!r}")
        if not (0 < self.alpha <= 1):
            raise DomainError(f"alpha debe estar en (0, 1], se recibio {self.alpha!r}")

    @property
    def Q_L(self):
        """Factor de calidad cargado 1/Q_L = 1/Q_i + 1/Q_c."""
        return 1.0 / (1.0 / self.Q_i0 + 1.0 / self.Q_c)


@dataclass(frozen=True)
class ResonatorState:
    """Observables del resonador en un punto de operacion."""

    f_res: float
    Q_i: float
    Q_L: float
    T_eff: Optional[float] = None


@contextmanager
def sin_avisos_validez():
    """Silencia ValidityWarning mientras se evalua el modelo muchas veces."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        yield


def _validar_referencia(T, T_ref, material):
    arr = np.asarray(T, dtype=float)
    if not (T_ref > 0):
        raise DomainError(f"T_ref debe ser > 0, se recibio {T_ref!r}")
    if np.any(arr < T_ref):
        raise DomainError(f"se requiere T >= T_ref = {T_ref} K, se recibio {T!r}")
    if np.any(arr >= material.T_c):
        raise DomainError(f"se requiere T < T_c = {material.T_c} K, se recibio {T!r}")
    return arr


def modelo_desplazamientos(T, T_ref, f, alpha, material):
    """Retorna (dff, dinvQ) sin validar; compartido con el ajuste de alpha y T_c."""
    actual = sigma_ratio(T, f, material)
    referencia = sigma_ratio(T_ref, f, material)
    dff = alpha / 2.0 * (actual.s2 - referencia.s2) / referencia.s2
    dinvq = alpha * (actual.s1 - referencia.s1) / referencia.s2
    return dff, dinvq


def _como_entrada(valor, T):
    if np.ndim(T) == 0:
        return float(valor)
    return valor


def freq_shift(T, baseline, material, T_ref=T_REF_DEFECTO):
    """
    Desplazamiento relativo de frecuencia (ec. 1).

    dff = (alpha/2) (sigma2(T) - sigma2(T_ref)) / sigma2(T_ref), evaluado en
    f = f_res0. Siempre <= 0.
    """
    arr = _validar_referencia(T, T_ref, material)
    dff, _ = modelo_desplazamientos(arr, T_ref, baseline.f_res0, baseline.alpha, material)
    return _como_entrada(dff, T)


def loss_shift(T, baseline, material, T_ref=T_REF_DEFECTO):
    """
    Cambio en la perdida interna (ec. 2).

    dinvQ = alpha (sigma1(T) - sigma1(T_ref)) / sigma2(T_ref). Siempre >= 0.
    """
    arr = _validar_referencia(T, T_ref, material)
    _, dinvq = modelo_desplazamientos(arr, T_ref, baseline.f_res0, baseline.alpha, material)
    return _como_entrada(dinvq, T)


def resonator_state(T, baseline, material, T_ref=T_REF_DEFECTO):
    """Observables (f_res, Q_i, Q_L) a temperatura T."""
    dff, dinvq = modelo_desplazamientos(
        _validar_referencia(T, T_ref, material), T_ref, baseline.f_res0, baseline.alpha, material
    )
    f_res = baseline.f_res0 * (1.0 + float(dff))
    q_i = 1.0 / (1.0 / baseline.Q_i0 + float(dinvq))
    q_l = 1.0 / (1.0 / q_i + 1.0 / baseline.Q_c)
    return ResonatorState(f_res=f_res, Q_i=q_i, Q_L=q_l, T_eff=float(T))


def effective_temperature(dinvQ, baseline, material, T_ref=T_REF_DEFECTO):
    """
    Temperatura efectiva cuya perdida de Mattis-Bardeen iguala dinvQ.

    Busca por biseccion en [T_ref, 0.95 T_c]; loss_shift es monotona ahi.
    dinvQ = 0 retorna T_ref. Si dinvQ supera la perdida en el techo del
    intervalo lanza OutOfRangeError.
    """
    dinvQ = float(dinvQ)
    if not np.isfinite(dinvQ) or dinvQ < 0:
        raise DomainError(f"dinvQ debe ser >= 0 y finito, se recibio {dinvQ!r}")
    if dinvQ == 0:
        return T_ref

    techo = TECHO_BUSQUEDA * material.T_c
    if T_ref >= techo:
        raise DomainError(f"T_ref = {T_ref} K no esta bajo 0.95 T_c = {techo} K")

    def residuo(T):
        return float(modelo_desplazamientos(T, T_ref, baseline.f_res0, baseline.alpha, material)[1]) - dinvQ

    with sin_avisos_validez():
        maximo = residuo(techo) + dinvQ
        if dinvQ > maximo:
            raise OutOfRangeError(
                f"dinvQ = {dinvQ:.4g} supera la perdida maxima {maximo:.4g} en 0.95 T_c"
            )
        if dinvQ == maximo:
            t_eff = techo
        else:
            t_eff = optimize.bisect(residuo, T_ref, techo, xtol=TOLERANCIA_T, maxiter=200)

    if CONSTANTES.k_B * t_eff >= LIMITE_VALIDEZ * gap0(material):
        warnings.warn(
            f"T_eff = {t_eff:.4f} K esta fuera del limite k_B T << Delta",
            ValidityWarning,
            stacklevel=2,
        )
    return t_eff


def invert_loss_series(dinvQ_series, baseline, material, T_ref=T_REF_DEFECTO):
    """
    Invierte una serie de perdidas fila a fila.

    Retorna (T_eff, dff_pred, avisos): dos listas con NaN en las filas que no
    se pudieron invertir y una lista con el motivo (None si la fila esta bien).
    Si una fila falla se registra y se sigue con las demas.
    """
    temperaturas, predichos, avisos = [], [], []
    for i, valor in enumerate(dinvQ_series):
        try:
            t_eff = effective_temperature(valor, baseline, material, T_ref)
            with sin_avisos_validez():
                dff = freq_shift(t_eff, baseline, material, T_ref)
        except (OutOfRangeError, DomainError) as e:
            logger.warning("[Teff] fila %d (dinvQ=%r) marcada: %s", i, valor, e)
            temperaturas.append(math.nan)
            predichos.append(math.nan)
            avisos.append(str(e))
            continue
        temperaturas.append(t_eff)
        predichos.append(dff)
        avisos.append(None)
    return temperaturas, predichos, avisos


def predict_freq_from_loss(dinvQ_series, baseline, material, T_ref=T_REF_DEFECTO):
    """
    Curva predicha de dff a partir de perdidas medidas: freq_shift(T_eff(dinvQ)).

    Las filas fuera de rango quedan como NaN; el lote no se interrumpe.
    """
    _, predichos, _ = invert_loss_series(dinvQ_series, baseline, material, T_ref)
    return predichos


# =============================================================
# TIEMPO DE RECOMBINACION DE CUASIPARTICULAS
# =============================================================

def qp_recombination_time_thermal(T, material):
    """
    Tiempo de recombinacion en equilibrio termico (Delta = Delta0):

        tau_qp = tau0/sqrt(pi) (k_B T_c / 2 Delta)^(5/2) sqrt(T_c/T) exp(Delta/k_B T)

    Donde exp(Delta/k_B T) desborda retorna +inf con OverflowGuardWarning.
    """
    arr = np.asarray(T, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"T debe ser > 0, se recibio {T!r}")
    if np.any(arr >= material.T_c):
        warnings.warn(f"tau_qp evaluado en T >= T_c = {material.T_c} K", ValidityWarning, stacklevel=2)

    delta = gap0(material)
    kTc = CONSTANTES.k_B * material.T_c
    prefactor = material.tau0 / math.sqrt(math.pi) * (kTc / (2.0 * delta)) ** 2.5
    log_tau = math.log(prefactor) + 0.5 * np.log(material.T_c / arr) + delta / (CONSTANTES.k_B * arr)

    desborde = log_tau > LOG_MAXIMO
    if np.any(desborde):
        warnings.warn(
            "tau_qp desborda a temperaturas tan bajas; se retorna +inf",
            OverflowGuardWarning,
            stacklevel=2,
        )
    with np.errstate(over="ignore"):
        tau = np.exp(log_tau)
    return _como_entrada(tau, T)


def qp_recombination_time_generic(n_qp, material):
    """
    Tiempo de recombinacion para una densidad de cuasiparticulas cualquiera:

        tau_qp = (tau0 / n_qp) N0 (k_B T_c)^3 / (2 Delta0^2)

    n_qp acepta QuasiparticleDensity o un numero; necesita N0.
    """
    n = getattr(n_qp, "n_qp", n_qp)
    arr = np.asarray(n, dtype=float)
    if np.any(arr <= 0):
        raise DomainError(f"n_qp debe ser > 0, se recibio {n!r}")
    n0 = material.requiere_n0()
    delta = gap0(material)
    kTc = CONSTANTES.k_B * material.T_c
    tau = material.tau0 / arr * n0 * kTc ** 3 / (2.0 * delta ** 2)
    return _como_entrada(tau, n)


def tau_qp_at_teff(dinvQ_series, baseline, material, T_ref=T_REF_DEFECTO):
    """
    tau_qp termico evaluado en la temperatura efectiva de cada perdida.

    Sirve para poner el tiempo de recombinacion esperado junto a los tiempos
    caracteristicos medidos en funcion del punto de trabajo del gate.
    Retorna (T_eff, tau_qp) con NaN en filas fuera de rango.
    """
    temperaturas, _, _ = invert_loss_series(dinvQ_series, baseline, material, T_ref)
    taus = [
        math.nan if math.isnan(t) else qp_recombination_time_thermal(t, material)
        for t in temperaturas
    ]
    return temperaturas, taus


# =============================================================
# BARRIDOS DE GATE MEDIDOS
# =============================================================

def shifts_from_gate_sweep(vg, fres, qi, ig=None):
    """
    Convierte un barrido medido (V_g, f_res, Q_i) en (dff, dinvQ).

    La referencia es la fila con menor |V_g|. La corriente de fuga I_g se
    acepta para conservarla en las tablas pero no se modela.

    Retorna:
        (dff, dinvQ) como arreglos numpy.
    """
    vg = np.asarray(vg, dtype=float)
    fres = np.asarray(fres, dtype=float)
    qi = np.asarray(qi, dtype=float)
    if not (vg.shape == fres.shape == qi.shape) or vg.size == 0:
        raise DomainError("V_g, f_res y Q_i deben tener el mismo largo, no vacio")
    if ig is not None and np.shape(ig) != vg.shape:
        raise DomainError("I_g debe tener el mismo largo que V_g")
    if np.any(fres <= 0) or np.any(qi <= 0):
        raise DomainError("f_res y Q_i deben ser > 0")

    ref = int(np.argmin(np.abs(vg)))
    dff = (fres - fres[ref]) / fres[ref]
    dinvq = 1.0 / qi - 1.0 / qi[ref]
    logger.info("[Gate] referencia en V_g = %.4g V (f_res = %.6g Hz, Q_i = %.4g)", vg[ref], fres[ref], qi[ref])
    return dff, dinvq
