"""
Ajustes por minimos cuadrados no lineales.

  - nlls: el motor comun (region de confianza con jacobiano numerico)
  - lorentzian_fit: f*, gamma, beta, theta de una curva de resonancia
  - exp_fit: decaimiento exponencial con A y t0 fijos (se ajustan B y tau)
  - circle_fit: f_res, Q_L, Q_c, Q_i de una traza S21 compleja (puerto notch)
  - mb_fit: alpha y T_c a partir de dff(T) y dinvQ(T)
  - fit_gate_edges / fit_ring_up: los ajustes de las trazas temporales

Cada ajustador trabaja internamente en unidades escaladas (frecuencias
relativas al centro, tiempos relativos al largo de la ventana) y reporta en
unidades SI.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from mbres.errores import (
    CircleDegeneracyError,
    DegenerateDataError,
    DomainError,
    FitError,
    FitRangeWarning,
    InsufficientSpanError,
    SingularJacobianError,
)
from mbres.mattis_bardeen import MaterialParams, RAZON_BCS
from mbres.resonator import modelo_desplazamientos, sin_avisos_validez

logger = logging.getLogger(__name__)

# --- CONFIGURACION ---

# Criterios de termino de least_squares
FTOL = 1e-10
XTOL = 1e-12
GTOL = 1e-12
MAX_ITERACIONES = 200

# Puntos minimos por ajustador
MINIMO_LORENTZ = 8
MINIMO_CIRCULO = 30
MINIMO_EXP = 3

# Span minimo de una traza para el circle fit, en anchos de linea
SPAN_MINIMO_CIRCULO = 3.0

# Fraccion de puntos en cada extremo usada para estimar el retardo del cable
FRACCION_RETARDO = 0.1

# Frecuencia por defecto para el ajuste de alpha y T_c
F_RES_DEFECTO = 6.84e9

# Umbral de la advertencia de rango de temperatura insuficiente
FRACCION_RANGO_T = 0.4


# =============================================================
# TIPOS
# =============================================================

@dataclass(frozen=True)
class FitResult:
    """
    Resultado de un ajuste.

    params y stderr son diccionarios nombre -> valor en el orden de ajuste.
    residuals son los residuos ponderados en el optimo (parte real y luego
    imaginaria para datos complejos), jacobian su jacobiano numerico.
    """

    params: dict
    stderr: dict
    residual_norm: float
    converged: bool
    iterations: int
    residuals: np.ndarray = field(default=None, repr=False)
    jacobian: np.ndarray = field(default=None, repr=False)
    covariance: np.ndarray = field(default=None, repr=False)

    def as_record(self):
        """Lineas clave=valor, listas para imprimir o guardar."""
        lineas = []
        for nombre, valor in self.params.items():
            lineas.append(f"{nombre}={valor:.10g}")
            lineas.append(f"{nombre}_stderr={self.stderr[nombre]:.4g}")
        lineas.append(f"residual_norm={self.residual_norm:.6g}")
        lineas.append(f"converged={str(self.converged).lower()}")
        lineas.append(f"iterations={self.iterations}")
        return lineas


@dataclass(frozen=True)
class LorentzianParams:
    """s(f) = beta gamma^2 / ((f - f*)^2 + gamma^2) + theta, gamma como semiancho."""

    f_star: float
    gamma: float
    beta: float
    theta: float

    @property
    def Q_L_hwhm(self):
        """Q_L = f*/(2 gamma): gamma leido como semiancho a media altura."""
        return self.f_star / (2.0 * self.gamma)

    @property
    def Q_L_fwhm(self):
        """Q_L = f*/gamma: gamma leido como ancho completo."""
        return self.f_star / self.gamma


@dataclass(frozen=True)
class ExpDecayParams:
    """y(t) = B + (A - B) exp(-(t - t0)/tau)."""

    A: float
    B: float
    t0: float
    tau: float


@dataclass(frozen=True)
class CircleFitResult:
    """Parametros del resonador extraidos del circulo S21 (puerto notch)."""

    f_res: float
    Q_L: float
    Q_c: float
    Q_i: float
    Q_c_abs: float
    phi: float
    a: float
    alpha: float
    delay: float
    Q_i_stderr: float = math.nan
    Q_c_stderr: float = math.nan

    def as_record(self):
        return [
            f"fres_Hz={self.f_res:.10g}",
            f"Ql={self.Q_L:.8g}",
            f"Qc={self.Q_c:.8g}",
            f"Qc_stderr={self.Q_c_stderr:.4g}",
            f"Qi={self.Q_i:.8g}",
            f"Qi_stderr={self.Q_i_stderr:.4g}",
            f"phi_rad={self.phi:.6g}",
            f"delay_s={self.delay:.6g}",
        ]


@dataclass(frozen=True)
class RingUpResult:
    """Ajuste del ring-up y su comparacion con 2/kappa."""

    params: ExpDecayParams
    fit: FitResult
    tau_amplitude: float = math.nan

    @property
    def tau(self):
        return self.params.tau

    @property
    def ratio(self):
        return self.params.tau / self.tau_amplitude


@dataclass(frozen=True)
class GateEdges:
    """Tiempos de subida y bajada de la respuesta al gate."""

    tau_R: float
    tau_F: float
    fit_R: FitResult
    fit_F: FitResult


# =============================================================
# MOTOR
# =============================================================

def _a_real(r):
    if np.iscomplexobj(r):
        return np.concatenate([r.real, r.imag])
    return np.asarray(r, dtype=float)


def nlls(model, x, y, init, names=None, bounds=None, weights=None):
    """
    Minimos cuadrados no lineales: minimiza sum |w (model(x, p) - y)|^2.

    model(x, p) puede retornar valores reales o complejos. Usa la region de
    confianza reflectiva de scipy con jacobiano por diferencias centrales.
    La falta de convergencia queda en FitResult.converged, no se lanza.

    Retorna:
        FitResult con errores estandar de (J^T J)^-1 s^2, s^2 = 2 costo/(m - n).
    """
    y = np.asarray(y)
    p0 = np.atleast_1d(np.asarray(init, dtype=float))
    nombres = list(names) if names is not None else [f"p{i}" for i in range(p0.size)]
    if len(nombres) != p0.size:
        raise DomainError("la cantidad de nombres no coincide con la de parametros")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(p0))):
        raise DomainError("los datos y el punto inicial deben ser finitos")

    pesos = np.ones(y.shape) if weights is None else np.asarray(weights, dtype=float)
    if pesos.shape != y.shape or np.any(pesos < 0) or not np.all(np.isfinite(pesos)):
        raise DomainError("los pesos deben ser >= 0, finitos y del largo de los datos")

    if bounds is None:
        inferior = np.full(p0.size, -np.inf)
        superior = np.full(p0.size, np.inf)
    else:
        inferior = np.broadcast_to(np.asarray(bounds[0], dtype=float), p0.shape)
        superior = np.broadcast_to(np.asarray(bounds[1], dtype=float), p0.shape)
    if np.any(p0 < inferior) or np.any(p0 > superior):
        raise DomainError(f"el punto inicial {p0} esta fuera de los limites")

    def residuos(p):
        return _a_real(pesos * (model(x, p) - y))

    try:
        res = optimize.least_squares(
            residuos, p0, jac="3-point", bounds=(inferior, superior), method="trf",
            ftol=FTOL, xtol=XTOL, gtol=GTOL, max_nfev=MAX_ITERACIONES,
        )
    except DomainError:
        raise
    except ValueError as e:
        raise FitError(f"el modelo no se pudo evaluar: {e}") from e

    jac = np.atleast_2d(res.jac)
    m, n = jac.shape
    if np.linalg.matrix_rank(jac) < n:
        raise SingularJacobianError("jacobiano singular: hay parametros que los datos no determinan")

    varianza = 2.0 * res.cost / (m - n) if m > n else math.inf
    if math.isinf(varianza):
        cov = np.full((n, n), math.inf)
    else:
        cov = np.linalg.inv(jac.T @ jac) * varianza
    errores = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    if not res.success:
        logger.warning("[Ajuste] sin convergencia: %s", res.message)
    return FitResult(
        params=dict(zip(nombres, (float(v) for v in res.x))),
        stderr=dict(zip(nombres, (float(v) for v in errores))),
        residual_norm=float(np.linalg.norm(res.fun)),
        converged=bool(res.success),
        iterations=int(res.njev if res.njev is not None else res.nfev),
        residuals=res.fun,
        jacobian=jac,
        covariance=cov,
    )


def _reescalar(resultado, nombres, escalas, desplazamientos):
    """Pasa un FitResult de parametros escalados a unidades fisicas: p = d + e q."""
    escalas = np.asarray(escalas, dtype=float)
    desplazamientos = np.asarray(desplazamientos, dtype=float)
    q = np.array(list(resultado.params.values()))
    e = np.array(list(resultado.stderr.values()))
    fisicos = desplazamientos + escalas * q
    return FitResult(
        params=dict(zip(nombres, (float(v) for v in fisicos))),
        stderr=dict(zip(nombres, (float(v) for v in np.abs(escalas) * e))),
        residual_norm=resultado.residual_norm,
        converged=resultado.converged,
        iterations=resultado.iterations,
        residuals=resultado.residuals,
        jacobian=resultado.jacobian / escalas,
        covariance=resultado.covariance * np.outer(escalas, escalas),
    )


def _validar_serie(x, y, minimo, nombre):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    if x.ndim != 1 or x.shape != y.shape:
        raise DomainError(f"{nombre}: x e y deben ser 1D y del mismo largo")
    if x.size < minimo:
        raise DomainError(f"{nombre}: se necesitan al menos {minimo} puntos, hay {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError(f"{nombre}: hay valores no finitos")
    return x, y


def _es_plana(y):
    y = np.abs(y) if np.iscomplexobj(y) else y
    return np.ptp(y) <= 1e-12 * max(1.0, float(np.max(np.abs(y))))


# =============================================================
# LORENTZIANA Y EXPONENCIAL
# =============================================================

def _inicio_lorentz(f, mag):
    orden = np.argsort(f)
    f, mag = f[orden], mag[orden]
    cuarto = max(1, len(f) // 4)
    theta = float(np.median(np.concatenate([mag[:cuarto], mag[-cuarto:]])))
    i = int(np.argmax(np.abs(mag - theta)))
    beta = float(mag[i] - theta)
    sobre_media = f[np.abs(mag - theta) >= abs(beta) / 2.0]
    gamma = 0.5 * float(sobre_media.max() - sobre_media.min())
    if gamma <= 0:
        gamma = float(np.median(np.diff(f)))
    return float(f[i]), gamma, beta, theta


def lorentzian_fit(freq, mag, weights=None):
    """
    Ajusta s(f) = beta gamma^2 / ((f - f*)^2 + gamma^2) + theta.

    Sirve para picos (beta > 0) y valles (beta < 0). Para una traza de
    transmision notch conviene ajustar |s|^2, que es lorentziana exacta.

    Retorna:
        (LorentzianParams, FitResult)
    """
    f, mag = _validar_serie(freq, mag, MINIMO_LORENTZ, "lorentzian_fit")
    mag = np.asarray(mag, dtype=float)
    if _es_plana(mag):
        raise DegenerateDataError("la traza es plana: no hay resonancia que ajustar")

    f0, gamma0, beta0, theta0 = _inicio_lorentz(f, mag)
    escala_y = float(np.max(np.abs(mag)))
    u = (f - f0) / gamma0

    def modelo(u, p):
        centro, g, b, c = p
        return escala_y * (b * g * g / ((u - centro) ** 2 + g * g) + c)

    crudo = nlls(
        modelo, u, mag, [0.0, 1.0, beta0 / escala_y, theta0 / escala_y],
        names=["f_star", "gamma", "beta", "theta"],
        bounds=([-np.inf, 1e-9, -np.inf, -np.inf], np.inf),
        weights=weights,
    )
    resultado = _reescalar(
        crudo, ["f_star_Hz", "gamma_Hz", "beta", "theta"],
        [gamma0, gamma0, escala_y, escala_y], [f0, 0.0, 0.0, 0.0],
    )
    p = resultado.params
    params = LorentzianParams(f_star=p["f_star_Hz"], gamma=p["gamma_Hz"], beta=p["beta"], theta=p["theta"])
    logger.debug("[Lorentz] f* = %.9g Hz, gamma = %.4g Hz", params.f_star, params.gamma)
    return params, resultado


def exp_fit(t, y, t0, A, weights=None):
    """
    Ajusta y(t) = B + (A - B) exp(-(t - t0)/tau) con A y t0 fijos.

    Los parametros libres son B y tau. Todas las muestras deben cumplir t >= t0.

    Retorna:
        (ExpDecayParams, FitResult)
    """
    t, y = _validar_serie(t, y, MINIMO_EXP, "exp_fit")
    y = np.asarray(y, dtype=float)
    if np.any(t < t0):
        raise DomainError(f"exp_fit: hay muestras antes de t0 = {t0}")
    if _es_plana(y):
        raise DegenerateDataError("la serie es constante: no hay decaimiento que ajustar")
    largo = float(t.max() - t0)
    if largo <= 0:
        raise DegenerateDataError("todas las muestras estan en t0")

    cola = max(1, len(y) // 10)
    b0 = float(np.mean(y[np.argsort(t)][-cola:]))
    cerca = np.nonzero(np.abs(y - b0) <= abs(A - b0) / math.e)[0]
    tau0 = float(t[cerca[0]] - t0) if cerca.size else largo / 3.0
    if tau0 <= 0:
        tau0 = largo / 3.0

    escala_y = max(abs(A), float(np.max(np.abs(y))))
    s = (t - t0) / largo

    def modelo(s, p):
        b, q = p
        return escala_y * (b + (A / escala_y - b) * np.exp(-s / q))

    crudo = nlls(
        modelo, s, y, [b0 / escala_y, tau0 / largo], names=["B", "tau"],
        bounds=([-np.inf, 1e-9], np.inf), weights=weights,
    )
    resultado = _reescalar(crudo, ["B", "tau_s"], [escala_y, largo], [0.0, 0.0])
    params = ExpDecayParams(A=float(A), B=resultado.params["B"], t0=float(t0), tau=resultado.params["tau_s"])
    return params, resultado


# =============================================================
# CIRCLE FIT
# =============================================================

def _circulo_algebraico(z):
    """Ajuste algebraico de Pratt. Retorna (centro complejo, radio)."""
    x, y = z.real, z.imag
    cx, cy = float(np.mean(x)), float(np.mean(y))
    escala = float(max(np.std(x), np.std(y)))
    if escala == 0:
        raise CircleDegeneracyError("todos los puntos coinciden")
    u = (x - cx) / escala
    v = (y - cy) / escala
    datos = np.column_stack([u * u + v * v, u, v, np.ones_like(u)])
    momentos = datos.T @ datos
    restriccion = np.array([
        [0.0, 0.0, 0.0, -2.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [-2.0, 0.0, 0.0, 0.0],
    ])
    valores, vectores = linalg.eig(momentos, restriccion)
    finitos = np.isfinite(valores)
    if not np.any(finitos):
        raise CircleDegeneracyError("el ajuste algebraico no tiene solucion")
    reales = valores.real
    cota = -1e-10 * float(np.max(np.abs(reales[finitos])))
    candidatos = [k for k in range(4) if finitos[k] and reales[k] >= cota]
    if not candidatos:
        raise CircleDegeneracyError("el ajuste algebraico no tiene solucion")
    k = min(candidatos, key=lambda j: reales[j])
    coef = vectores[:, k].real
    if abs(coef[0]) <= 1e-12 * float(np.linalg.norm(coef)):
        raise CircleDegeneracyError("los puntos son colineales")
    uc = -coef[1] / (2.0 * coef[0])
    vc = -coef[2] / (2.0 * coef[0])
    radio = math.sqrt(max(coef[1] ** 2 + coef[2] ** 2 - 4.0 * coef[0] * coef[3], 0.0)) / (2.0 * abs(coef[0]))
    if radio == 0 or radio > 1e6:
        raise CircleDegeneracyError("los puntos no forman un circulo")
    return complex(cx + uc * escala, cy + vc * escala), radio * escala


def _retardo(f, z):
    """Retardo del cable: pendiente de fase fuera de resonancia, refinada minimizando el residuo del circulo."""
    n = max(2, int(FRACCION_RETARDO * len(f)))
    fase = np.unwrap(np.angle(z))
    extremos = np.r_[0:n, len(f) - n:len(f)]
    pendiente = np.polyfit(f[extremos] - f[0], fase[extremos], 1)[0]
    span = float(f[-1] - f[0])
    q0 = -pendiente / (2.0 * np.pi) * span

    def residuo(q):
        zc = z * np.exp(2j * np.pi * (f - f[0]) * q[0] / span)
        centro, radio = _circulo_algebraico(zc)
        return (np.abs(zc - centro) - radio) / radio

    res = optimize.least_squares(residuo, [q0], method="trf", ftol=FTOL, xtol=XTOL, max_nfev=MAX_ITERACIONES)
    return float(res.x[0]) / span


def _ajuste_fase(f, z_centrado, fr0):
    """theta(f) = theta0 + 2 arctan(2 Q_L (1 - f/f_r)) alrededor del centro del circulo."""
    theta = np.unwrap(np.angle(z_centrado))
    i0 = int(np.argmin(np.abs(f - fr0)))
    cerca = f[np.abs(theta - theta[i0]) <= np.pi / 2.0]
    ancho = float(cerca.max() - cerca.min()) if cerca.size > 1 else (f[-1] - f[0]) / 10.0
    ql0 = fr0 / ancho

    def modelo(f, p):
        th0, q, d = p
        fr = fr0 + d * ancho
        return th0 + 2.0 * np.arctan(2.0 * q * ql0 * (1.0 - f / fr))

    crudo = nlls(modelo, f, theta, [theta[i0], 1.0, 0.0], names=["theta0", "Ql", "fres"],
                 bounds=([-np.inf, 1e-6, -np.inf], np.inf))
    p = crudo.params
    return p["theta0"], p["Ql"] * ql0, fr0 + p["fres"] * ancho


def _modelo_notch(f, a, alpha, retardo, fr, ql, qc_abs, phi, f_ref=0.0):
    return (
        a * np.exp(1j * alpha) * np.exp(-2j * np.pi * (f - f_ref) * retardo)
        * (1.0 - (ql / qc_abs) * np.exp(1j * phi) / (1.0 + 2j * ql * (f / fr - 1.0)))
    )


def notch_s21(freq, f_res, Q_i, Q_c, phi=0.0, a=1.0, alpha=0.0, delay=0.0):
    """
    Transmision de un resonador notch.

    Q_c es el factor de acoplamiento real (1/Q_c = cos(phi)/|Q_c|), asi que
    1/Q_L = 1/Q_i + 1/Q_c tambien con desadaptacion de impedancia.
    """
    ql = 1.0 / (1.0 / Q_i + 1.0 / Q_c)
    return _modelo_notch(np.asarray(freq, dtype=float), a, alpha, delay, f_res, ql, Q_c * math.cos(phi), phi)


def circle_fit(freq, s21):
    """
    Extrae f_res, Q_L, Q_c y Q_i de una traza S21 compleja de puerto notch.

    Pasos: retardo del cable, circulo algebraico, ajuste de fase alrededor
    del centro, punto fuera de resonancia (a, alpha) y normalizacion, Q_c y
    phi desde el diametro, y un refinamiento final del modelo completo.

    Retorna:
        (CircleFitResult, FitResult) con el FitResult del refinamiento.
    """
    f = np.asarray(freq, dtype=float)
    z = np.asarray(s21, dtype=complex)
    if f.ndim != 1 or f.shape != z.shape:
        raise DomainError("circle_fit: freq y s21 deben ser 1D y del mismo largo")
    if f.size < MINIMO_CIRCULO:
        raise InsufficientSpanError(f"circle_fit necesita al menos {MINIMO_CIRCULO} puntos, hay {f.size}")
    if not (np.all(np.isfinite(f)) and np.all(np.isfinite(z))):
        raise DomainError("circle_fit: hay valores no finitos")
    if np.any(np.diff(f) <= 0):
        raise DomainError("circle_fit: las frecuencias deben ser estrictamente crecientes")

    retardo = _retardo(f, z)
    z_corr = z * np.exp(2j * np.pi * f * retardo)
    centro, radio = _circulo_algebraico(z_corr)

    fr0 = float(f[int(np.argmin(np.abs(z)))])
    theta0, ql, fr = _ajuste_fase(f, z_corr - centro, fr0)
    ancho = fr / ql
    if f[-1] - f[0] < SPAN_MINIMO_CIRCULO * ancho:
        raise InsufficientSpanError(
            f"la traza cubre {(f[-1] - f[0]) / ancho:.2f} anchos de linea; se necesitan {SPAN_MINIMO_CIRCULO}"
        )

    fuera = centro + radio * np.exp(1j * (theta0 + np.pi))
    a = abs(fuera)
    alpha = float(np.angle(fuera))
    centro_n = centro / fuera
    radio_n = radio / a
    phi = -math.asin(max(-1.0, min(1.0, centro_n.imag / radio_n)))
    qc_abs = ql / (2.0 * radio_n)

    # Refinamiento del modelo completo; el retardo se refiere al centro de la traza
    f_ref = float(np.mean(f))
    span = float(f[-1] - f[0])
    alpha_ref = alpha - 2.0 * np.pi * f_ref * retardo
    alpha_ref = math.atan2(math.sin(alpha_ref), math.cos(alpha_ref))

    def modelo(f, p):
        pa, pal, pret, pfr, pql, pqc, pphi = p
        return _modelo_notch(f, pa * a, pal, pret / span, fr + pfr * ancho, pql * ql, pqc * qc_abs, pphi, f_ref)

    crudo = nlls(
        modelo, f, z, [1.0, alpha_ref, retardo * span, 0.0, 1.0, 1.0, phi],
        names=["a", "alpha", "delay", "fres", "Ql", "Qc_abs", "phi"],
        bounds=([0.0, -np.inf, -np.inf, -np.inf, 1e-6, 1e-6, -np.pi / 2], [np.inf, np.inf, np.inf, np.inf, np.inf, np.inf, np.pi / 2]),
    )
    resultado = _reescalar(
        crudo, ["a", "alpha_ref_rad", "delay_s", "fres_Hz", "Ql", "Qc_abs", "phi_rad"],
        [a, 1.0, 1.0 / span, ancho, ql, qc_abs, 1.0], [0.0, 0.0, 0.0, fr, 0.0, 0.0, 0.0],
    )
    p = resultado.params
    ql_f, qc_abs_f, phi_f = p["Ql"], p["Qc_abs"], p["phi_rad"]
    qc = qc_abs_f / math.cos(phi_f)
    qi = 1.0 / (1.0 / ql_f - 1.0 / qc)

    # Propagacion lineal a Q_c y Q_i desde (Q_L, |Q_c|, phi)
    cov = resultado.covariance[np.ix_([4, 5, 6], [4, 5, 6])]
    grad_qc = np.array([0.0, 1.0 / math.cos(phi_f), qc * math.tan(phi_f)])
    grad_qi = qi ** 2 * np.array([1.0 / ql_f ** 2, -grad_qc[1] / qc ** 2, -grad_qc[2] / qc ** 2])
    alpha_f = p["alpha_ref_rad"] + 2.0 * np.pi * f_ref * p["delay_s"]

    circulo = CircleFitResult(
        f_res=p["fres_Hz"],
        Q_L=ql_f,
        Q_c=qc,
        Q_i=qi,
        Q_c_abs=qc_abs_f,
        phi=phi_f,
        a=p["a"],
        alpha=math.atan2(math.sin(alpha_f), math.cos(alpha_f)),
        delay=p["delay_s"],
        Q_i_stderr=float(math.sqrt(max(grad_qi @ cov @ grad_qi, 0.0))),
        Q_c_stderr=float(math.sqrt(max(grad_qc @ cov @ grad_qc, 0.0))),
    )
    logger.info("[Circulo] f_res = %.9g Hz, Q_i = %.1f, Q_c = %.1f", circulo.f_res, circulo.Q_i, circulo.Q_c)
    return circulo, resultado


# =============================================================
# ALPHA Y T_C
# =============================================================

def _inicio_tc(T, y, cota_inf, cota_sup):
    """T_c desde la energia de activacion: ln|y| ~ -1.764 T_c / T sobre la rodilla."""
    y = np.abs(y)
    sel = y > 0.01 * float(np.max(y))
    if np.count_nonzero(sel) >= 2:
        pendiente = np.polyfit(1.0 / T[sel], np.log(y[sel]), 1)[0]
        tc = -pendiente / RAZON_BCS
    else:
        tc = 2.0 * float(np.max(T))
    if not np.isfinite(tc):
        tc = 2.0 * float(np.max(T))
    return float(np.clip(tc, cota_inf * 1.01, cota_sup * 0.99))


def _combinar_canales(r_dff, r_dinvq):
    params, stderr = {}, {}
    for nombre in r_dff.params:
        params[nombre] = 0.5 * (r_dff.params[nombre] + r_dinvq.params[nombre])
        stderr[nombre] = 0.5 * math.hypot(r_dff.stderr[nombre], r_dinvq.stderr[nombre])
    return FitResult(
        params=params,
        stderr=stderr,
        residual_norm=math.hypot(r_dff.residual_norm, r_dinvq.residual_norm),
        converged=r_dff.converged and r_dinvq.converged,
        iterations=r_dff.iterations + r_dinvq.iterations,
        residuals=np.concatenate([r_dff.residuals, r_dinvq.residuals]),
        jacobian=np.vstack([r_dff.jacobian, r_dinvq.jacobian]),
        covariance=0.25 * (r_dff.covariance + r_dinvq.covariance),
    )


def mb_fit(T, dff, dinvQ, f_res=F_RES_DEFECTO, mode="joint", t_ref=None, tau0=30e-9,
           weighting="uniform"):
    """
    Ajusta alpha y T_c a los desplazamientos medidos dff(T) y dinvQ(T).

    mode: "joint" ajusta ambos canales a la vez, "dff" o "dinvq" solo uno, y
    "averaged" ajusta cada canal por separado y promedia (alpha, T_c).
    weighting: "uniform" pondera cada canal por 1/max|y|; "relative" pondera
    cada punto por 1/|y| (ruido multiplicativo).
    t_ref por defecto es la temperatura mas fria de la serie.

    Retorna:
        FitResult con params "alpha" y "Tc_K".
    """
    T = np.asarray(T, dtype=float)
    dff = np.asarray(dff, dtype=float)
    dinvQ = np.asarray(dinvQ, dtype=float)
    if not (T.shape == dff.shape == dinvQ.shape) or T.ndim != 1 or T.size < 3:
        raise DomainError("mb_fit: T, dff y dinvQ deben ser 1D, del mismo largo y con al menos 3 puntos")
    if not (np.all(np.isfinite(T)) and np.all(np.isfinite(dff)) and np.all(np.isfinite(dinvQ))):
        raise DomainError("mb_fit: hay valores no finitos")
    if np.any(np.diff(T) <= 0) or T[0] <= 0:
        raise DomainError("mb_fit: T debe ser positiva y estrictamente creciente")
    if mode not in ("joint", "dff", "dinvq", "averaged"):
        raise DomainError(f"mb_fit: modo desconocido {mode!r}")
    if weighting not in ("uniform", "relative"):
        raise DomainError(f"mb_fit: ponderacion desconocida {weighting!r}")
    t_ref = float(T[0]) if t_ref is None else float(t_ref)
    if not (0 < t_ref <= T[0]):
        raise DomainError("mb_fit: t_ref debe estar en (0, min(T)]")

    if mode == "averaged":
        r_dff = mb_fit(T, dff, dinvQ, f_res, "dff", t_ref, tau0, weighting)
        r_dinvq = mb_fit(T, dff, dinvQ, f_res, "dinvq", t_ref, tau0, weighting)
        logger.info(
            "[MB] dff: alpha = %.4f, T_c = %.4f K | dinvQ: alpha = %.4f, T_c = %.4f K",
            r_dff.params["alpha"], r_dff.params["Tc_K"], r_dinvq.params["alpha"], r_dinvq.params["Tc_K"],
        )
        return _combinar_canales(r_dff, r_dinvq)

    canales = {"joint": ("dff", "dinvq"), "dff": ("dff",), "dinvq": ("dinvq",)}[mode]
    datos = {"dff": dff, "dinvq": dinvQ}
    y = np.concatenate([datos[c] for c in canales])
    pesos = []
    for c in canales:
        escala = float(np.max(np.abs(datos[c])))
        if escala == 0:
            raise DegenerateDataError(f"mb_fit: el canal {c} es identicamente cero")
        if weighting == "uniform":
            pesos.append(np.full(T.size, 1.0 / escala))
        else:
            absoluto = np.abs(datos[c])
            pesos.append(np.where(absoluto > 0, 1.0 / np.where(absoluto > 0, absoluto, 1.0), 0.0))
    pesos = np.concatenate(pesos)

    cota_tc = (float(T[-1]) / 0.95 * (1.0 + 1e-9), 20.0 * float(T[-1]))

    def modelo(T, p):
        alpha, tc = p
        material = MaterialParams(T_c=tc, tau0=tau0)
        m_dff, m_dinvq = modelo_desplazamientos(T, t_ref, f_res, alpha, material)
        partes = {"dff": m_dff, "dinvq": m_dinvq}
        return np.concatenate([partes[c] for c in canales])

    # Inicio: T_c de la rodilla de la perdida, alpha del cociente en la T mas alta
    guia = dinvQ if "dinvq" in canales else dff
    tc0 = _inicio_tc(T[1:], guia[1:], *cota_tc)
    with sin_avisos_validez():
        unitario = modelo(T, [1.0, tc0])
    canal_guia = canales.index("dinvq") if "dinvq" in canales else 0
    ultimo = unitario[(canal_guia + 1) * T.size - 1]
    alpha0 = float(guia[-1] / ultimo) if ultimo != 0 else 0.1
    alpha0 = float(np.clip(alpha0, 1e-6 * 1.01, 1.0))

    with sin_avisos_validez():
        resultado = nlls(
            modelo, T, y, [alpha0, tc0], names=["alpha", "Tc_K"],
            bounds=([1e-6, cota_tc[0]], [1.0, cota_tc[1]]), weights=pesos,
        )

    tc = resultado.params["Tc_K"]
    if T[-1] < FRACCION_RANGO_T * tc:
        warnings.warn(
            f"max(T) = {T[-1]:.3f} K esta bajo 0.4 T_c = {FRACCION_RANGO_T * tc:.3f} K: "
            "el ajuste de T_c esta poco determinado",
            FitRangeWarning,
            stacklevel=2,
        )
    logger.info("[MB] %s: alpha = %.4f +/- %.4f, T_c = %.4f +/- %.4f K", mode,
                resultado.params["alpha"], resultado.stderr["alpha"], tc, resultado.stderr["Tc_K"])
    return resultado


# =============================================================
# TRAZAS TEMPORALES
# =============================================================

def fit_ring_up(trace, seq, f_res=None, Q_L=None, window=None):
    """
    Ajusta el ring-up de |s_out| desde el inicio del pulso de lectura.

    La ventana llega hasta el pulso de gate (si lo hay) o al fin de la
    lectura, o dura window segundos. Con f_res y Q_L se compara con 2/kappa.

    Retorna:
        RingUpResult
    """
    inicio = seq.readout_start
    fin = seq.readout_start + seq.readout_duration
    if seq.tiene_gate:
        fin = min(fin, seq.gate_start)
    if window is not None:
        fin = min(fin, inicio + window)
    tramo = trace.window(inicio, fin)
    magnitud = np.abs(tramo.s)
    params, fit = exp_fit(tramo.t, magnitud, tramo.t[0], float(magnitud[0]))
    esperado = math.nan
    if f_res is not None and Q_L is not None:
        esperado = Q_L / (math.pi * f_res)
        logger.info("[Ring-up] tau = %.4g s, 2/kappa = %.4g s (razon %.3f)", params.tau, esperado, params.tau / esperado)
    return RingUpResult(params=params, fit=fit, tau_amplitude=esperado)


def _ajustar_flanco(trace, inicio, fin):
    """Proyecta la traza sobre la direccion de la respuesta y ajusta la exponencial desde A = 0."""
    tramo = trace.window(inicio, fin)
    if tramo.t.size < MINIMO_LORENTZ:
        raise DomainError("la ventana del flanco tiene muy pocas muestras")
    s = tramo.s
    cola = max(1, s.size // 10)
    direccion = np.mean(s[-cola:]) - s[0]
    if abs(direccion) == 0:
        raise DegenerateDataError("la traza no responde al gate en este flanco")
    u = direccion / abs(direccion)
    proyeccion = np.real((s - s[0]) * np.conj(u))
    return exp_fit(tramo.t, proyeccion, tramo.t[0], 0.0)


def fit_gate_edges(trace_pos, trace_neg, seq, settle=60e-9, window=600e-9):
    """
    Tiempos tau_R y tau_F de la respuesta al gate.

    Se ajustan los flancos finales de ambos pulsos. En el experimento se
    hace lo contrario: se usan los flancos iniciales (subida del pulso +A_g
    para tau_R, bajada del pulso -A_g para tau_F) y se descartan los finales,
    porque el fin del pulso dispara una respuesta lenta de la linea de gate.
    Este modelo no tiene esa cola lenta; lo que si tiene es la caida del
    bias-tee durante el pulso, que deforma los flancos iniciales (con ellos
    tau_R sale ~69 ns para 80 ns programados). Por eso aca el flanco final
    del pulso -A_g (V_g sube) da tau_R y el del pulso +A_g (V_g baja) da
    tau_F. settle descarta los primeros tiempos de ring-up tras el flanco.

    Retorna:
        GateEdges
    """
    if not seq.tiene_gate:
        raise DomainError("la secuencia no tiene pulso de gate")
    inicio = seq.gate_start + seq.gate_duration + settle
    fin = min(inicio + window, seq.readout_start + seq.readout_duration)
    subida, fit_r = _ajustar_flanco(trace_neg, inicio, fin)
    bajada, fit_f = _ajustar_flanco(trace_pos, inicio, fin)
    logger.info("[Gate] tau_R = %.4g s, tau_F = %.4g s", subida.tau, bajada.tau)
    return GateEdges(tau_R=subida.tau, tau_F=bajada.tau, fit_R=fit_r, fit_F=fit_f)
