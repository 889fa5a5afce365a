"""
Simulador en el dominio del tiempo del experimento pulsado y modelo de
bandas laterales bajo modulacion continua del gate.

Cadena completa de simulate_map:
    pulso cuadrado de gate -> bias-tee (pasa-altos de un polo)
    -> relajacion de f_res, Q_i con tau_R / tau_F
    -> envolvente compleja del resonador (RK4 de paso fijo) por cada f_ro
    -> senal transmitida s_out = w(t) - s(t)

La ecuacion de la envolvente es

    ds/dt = [i 2 pi (f_res(t) - f_ro) - kappa(t)/2] s + (kappa_ext(t)/2) w(t)

con kappa = 2 pi f_res / Q_L, kappa_ext = 2 pi f_res / Q_c y w(t) la ventana
de lectura (0 o 1). Con esa normalizacion el |s| estacionario en resonancia
es Q_L/Q_c, la profundidad del dip del modelo notch.
"""

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import signal

from mbres.errores import (
    DomainError,
    NoCrossingError,
    PulseWindowWarning,
    SamplingError,
    SmallSignalWarning,
    StepSizeError,
)

logger = logging.getLogger(__name__)

# --- CONFIGURACION ---

# Corte del bias-tee de la linea de gate
FC_BIASTEE = 40e3

# Ventana de duracion del pulso de gate: suficiente para saturar la
# respuesta, pero sin distorsion apreciable del bias-tee
TAU_G_MINIMO = 200e-9
TAU_G_MAXIMO = 1e-6

# Fraccion maxima dt * f_c admitida por el filtro del bias-tee
MAXIMO_DT_FC = 0.1

# Muestras minimas por periodo de desintonia y por tiempo de ring-up
MUESTRAS_POR_PERIODO = 20

# Profundidad de modulacion maxima, como fraccion del ancho de linea
LIMITE_SENAL_PEQUENA = 0.1


# =============================================================
# TIPOS
# =============================================================

@dataclass(frozen=True)
class PulseSequence:
    """
    Secuencia pulsada: periodo de trigger, pulso de lectura y pulso de gate.

    Tiempos en segundos, frecuencia de lectura en Hz, amplitud y offset del
    gate en volts. gate_offset es el punto de trabajo DC (V_g); el pulso de
    amplitud gate_amplitude pasa por el bias-tee, el offset no.
    """

    trigger_period: float
    readout_start: float
    readout_duration: float
    gate_start: float = 0.0
    gate_duration: float = 0.0
    gate_amplitude: float = 0.0
    gate_offset: float = 0.0
    readout_freq: Optional[float] = None

    def __post_init__(self):
        tiempos = {
            "trigger_period": self.trigger_period,
            "readout_start": self.readout_start,
            "readout_duration": self.readout_duration,
            "gate_start": self.gate_start,
            "gate_duration": self.gate_duration,
        }
        for nombre, valor in tiempos.items():
            if not (np.isfinite(valor) and valor >= 0):
                raise DomainError(f"{nombre} debe ser >= 0, se recibio {valor!r}")
        if self.trigger_period <= 0:
            raise DomainError("trigger_period debe ser > 0")
        if self.readout_start + self.readout_duration > self.trigger_period:
            raise DomainError("el pulso de lectura termina despues del periodo de trigger")
        if self.tiene_gate:
            fin_gate = self.gate_start + self.gate_duration
            if fin_gate > self.trigger_period:
                raise DomainError("el pulso de gate termina despues del periodo de trigger")
            if self.readout_duration > 0 and not (
                self.readout_start <= self.gate_start
                and fin_gate <= self.readout_start + self.readout_duration
            ):
                raise DomainError("la ventana de lectura debe contener el pulso de gate")
            if not (TAU_G_MINIMO < self.gate_duration <= TAU_G_MAXIMO):
                warnings.warn(
                    f"tau_g = {self.gate_duration * 1e9:.0f} ns fuera de (200 ns, 1 us]: "
                    "la respuesta puede no saturar o verse afectada por el bias-tee",
                    PulseWindowWarning,
                    stacklevel=3,
                )

    @property
    def tiene_gate(self):
        return self.gate_duration > 0 and self.gate_amplitude != 0

    @classmethod
    def reference(cls, gate_amplitude=1.5, gate_offset=0.0, gate_duration=500e-9):
        """Secuencia de 5 us con lectura de 4 us desde 0.6 us y gate a los 2 us."""
        return cls(
            trigger_period=5e-6,
            readout_start=0.6e-6,
            readout_duration=4e-6,
            gate_start=2e-6,
            gate_duration=gate_duration,
            gate_amplitude=gate_amplitude,
            gate_offset=gate_offset,
        )

    def with_gate(self, amplitude):
        """Copia de la secuencia con otra amplitud de gate."""
        return PulseSequence(
            trigger_period=self.trigger_period,
            readout_start=self.readout_start,
            readout_duration=self.readout_duration,
            gate_start=self.gate_start,
            gate_duration=self.gate_duration,
            gate_amplitude=amplitude,
            gate_offset=self.gate_offset,
            readout_freq=self.readout_freq,
        )

    def time_grid(self, dt):
        """Grilla uniforme 0, dt, 2dt, ... dentro del periodo de trigger."""
        if not dt > 0:
            raise DomainError(f"dt debe ser > 0, se recibio {dt!r}")
        n = int(round(self.trigger_period / dt))
        return np.arange(n) * dt

    def readout_window(self, t):
        """Ventana de lectura w(t) en {0, 1}."""
        fin = self.readout_start + self.readout_duration
        return _ventana(t, self.readout_start, fin)

    def gate_pulse(self, t):
        """Pulso cuadrado de gate (sin offset DC)."""
        if not self.tiene_gate:
            return np.zeros_like(t)
        return self.gate_amplitude * _ventana(t, self.gate_start, self.gate_start + self.gate_duration)


def _ventana(t, inicio, fin):
    # Bordes alineados a la grilla aunque haya error de redondeo en t
    eps = 1e-6 * (t[1] - t[0]) if len(t) > 1 else 0.0
    return ((t >= inicio - eps) & (t < fin - eps)).astype(float)


@dataclass(frozen=True)
class GateResponseModel:
    """
    Respuesta del resonador al gate: tablas V_g -> f_res y V_g -> Q_i
    (medidas o sinteticas) y los tiempos de subida y bajada.
    """

    tau_R: float
    tau_F: float
    vg_table: np.ndarray
    fres_table: np.ndarray
    qi_table: np.ndarray

    def __post_init__(self):
        if not (self.tau_R > 0 and self.tau_F > 0):
            raise DomainError("tau_R y tau_F deben ser > 0")
        vg = np.asarray(self.vg_table, dtype=float)
        fres = np.asarray(self.fres_table, dtype=float)
        qi = np.asarray(self.qi_table, dtype=float)
        if not (vg.shape == fres.shape == qi.shape) or vg.size < 2:
            raise DomainError("las tablas del gate deben tener el mismo largo (>= 2)")
        if np.any(np.diff(vg) <= 0):
            raise DomainError("V_g de la tabla debe ser estrictamente creciente")
        for nombre, valores in (("f_res", fres), ("Q_i", qi)):
            paso = np.diff(valores)
            if not (np.all(paso > 0) or np.all(paso < 0)):
                raise DomainError(f"la tabla {nombre}(V_g) debe ser estrictamente monotona")
        object.__setattr__(self, "vg_table", vg)
        object.__setattr__(self, "fres_table", fres)
        object.__setattr__(self, "qi_table", qi)

    @classmethod
    def linear(cls, v0, fres0, qi0, dfres_dv, dqi_dv, span=5.0, tau_R=100e-9, tau_F=100e-9):
        """Tablas lineales alrededor de (v0, fres0, qi0), validas en v0 +/- span."""
        vg = np.array([v0 - span, v0 + span])
        fres = fres0 + dfres_dv * (vg - v0)
        qi = qi0 + dqi_dv * (vg - v0)
        if np.any(qi <= 0) or np.any(fres <= 0):
            raise DomainError("las tablas lineales dejan f_res o Q_i <= 0 en el rango pedido")
        return cls(tau_R=tau_R, tau_F=tau_F, vg_table=vg, fres_table=fres, qi_table=qi)

    def _interpolar(self, vg, valores):
        vg = np.asarray(vg, dtype=float)
        if np.any(vg < self.vg_table[0]) or np.any(vg > self.vg_table[-1]):
            raise DomainError(
                f"V_g fuera de la tabla [{self.vg_table[0]}, {self.vg_table[-1]}] V; no se extrapola"
            )
        return np.interp(vg, self.vg_table, valores)

    def fres_of_vg(self, vg):
        return self._interpolar(vg, self.fres_table)

    def qi_of_vg(self, vg):
        return self._interpolar(vg, self.qi_table)


@dataclass(frozen=True)
class TimeTrace:
    """Traza compleja s(t) en una grilla uniforme."""

    t: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise DomainError("la traza necesita al menos dos muestras")
        pasos = np.diff(t)
        if np.any(pasos <= 0) or not np.allclose(pasos, pasos[0], rtol=1e-6, atol=0):
            raise DomainError("la grilla temporal debe ser uniforme y creciente")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "s", np.asarray(self.s, dtype=complex))

    @property
    def dt(self):
        return float(self.t[1] - self.t[0])

    @property
    def magnitude(self):
        return np.abs(self.s)

    def window(self, inicio, fin):
        """Sub-traza con inicio <= t < fin."""
        mascara = (self.t >= inicio - 1e-6 * self.dt) & (self.t < fin - 1e-6 * self.dt)
        return TimeTrace(self.t[mascara], self.s[mascara])


@dataclass(frozen=True)
class TimeMap:
    """
    Mapa s_out(t, f_ro): una traza por frecuencia de lectura, mas las
    trayectorias programadas f_res(t), Q_L(t) y V_g(t).
    """

    t: np.ndarray
    f_ro: np.ndarray
    s: np.ndarray
    fres_t: np.ndarray
    ql_t: np.ndarray
    vg_t: np.ndarray

    def trace(self, i):
        return TimeTrace(self.t, self.s[i])

    def _indice_t(self, t):
        return int(np.argmin(np.abs(self.t - t)))

    def vertical_cut(self, t):
        """Corte a tiempo fijo: (f_ro, s_out(t, f_ro)), una espectroscopia instantanea."""
        return self.f_ro, self.s[:, self._indice_t(t)]

    def horizontal_cut(self, f_ro):
        """Traza a la f_ro mas cercana."""
        return self.trace(int(np.argmin(np.abs(self.f_ro - f_ro))))

    def programmed_fres(self, t):
        return float(self.fres_t[self._indice_t(t)])


@dataclass(frozen=True)
class SidebandSpectrum:
    """Lineas del portador f_r y de las bandas laterales f_r +/- f_g."""

    frequencies: list
    amplitude: list
    power_db: list
    carrier_index: int = 1
    lower_index: int = 0
    upper_index: int = 2

    @property
    def sideband_to_carrier_db(self):
        """Promedio de las bandas superior e inferior relativo al portador, en dB."""
        promedio = 0.5 * (self.amplitude[self.upper_index] + self.amplitude[self.lower_index])
        return 20.0 * math.log10(promedio / self.amplitude[self.carrier_index])


@dataclass(frozen=True)
class SidebandSweep:
    """Amplitud de banda lateral relativa al portador versus f_g, y su punto de -3 dB."""

    f_g: np.ndarray
    amp_rel_db: np.ndarray
    f_3db: float
    spectra: list = field(default_factory=list, repr=False)


# =============================================================
# BIAS-TEE Y RELAJACION DEL GATE
# =============================================================

def biastee_highpass(x, f_c, dt):
    """
    Pasa-altos causal de un polo real en 2 pi f_c (rama RF del bias-tee).

    Discretizacion exacta para entradas constantes por tramos:
        y[n] = p y[n-1] + x[n] - x[n-1],  p = exp(-2 pi f_c dt)
    con x = 0 antes de la primera muestra. Un escalon de altura A decae
    como A exp(-2 pi f_c t).
    """
    if not f_c > 0:
        raise DomainError(f"f_c debe ser > 0, se recibio {f_c!r}")
    if not dt > 0:
        raise DomainError(f"dt debe ser > 0, se recibio {dt!r}")
    if dt * f_c >= MAXIMO_DT_FC:
        raise SamplingError(f"muestreo demasiado grueso: dt*f_c = {dt * f_c:.3g} >= {MAXIMO_DT_FC}")
    p = math.exp(-2.0 * math.pi * f_c * dt)
    return signal.lfilter([1.0, -1.0], [1.0, -p], np.asarray(x, dtype=float))


def gate_relaxation(vg, model, dt):
    """
    Relaja f_res y Q_i hacia sus valores de tabla con un retardo de primer orden.

    El objetivo f*(t) = fres_of_vg(vg(t)) se sigue con tau_R cuando el voltaje
    objetivo esta por sobre el voltaje equivalente al estado actual (subida)
    y con tau_F en caso contrario. El objetivo se mantiene constante entre
    muestras, asi un escalon en t0 llega a 1 - e^-1 en t0 + tau.

    Retorna:
        (fres_t, qi_t) como arreglos del largo de vg.
    """
    vg = np.asarray(vg, dtype=float)
    objetivo_f = model.fres_of_vg(vg)
    objetivo_q = model.qi_of_vg(vg)
    pendiente = 1.0 if model.fres_table[-1] > model.fres_table[0] else -1.0

    decaimiento_r = math.exp(-dt / model.tau_R)
    decaimiento_f = math.exp(-dt / model.tau_F)

    fres = np.empty_like(objetivo_f)
    qi = np.empty_like(objetivo_q)
    fres[0] = objetivo_f[0]
    qi[0] = objetivo_q[0]
    for n in range(1, len(vg)):
        subida = (objetivo_f[n - 1] - fres[n - 1]) * pendiente >= 0
        factor = decaimiento_r if subida else decaimiento_f
        fres[n] = objetivo_f[n - 1] + (fres[n - 1] - objetivo_f[n - 1]) * factor
        qi[n] = objetivo_q[n - 1] + (qi[n - 1] - objetivo_q[n - 1]) * factor
    return fres, qi


# =============================================================
# ENVOLVENTE DEL RESONADOR
# =============================================================

def ring_time_constants(f_res, Q_L):
    """
    Las dos convenciones del tiempo de ring-up.

    Retorna:
        dict con "amplitude_s" = 2/kappa = Q_L/(pi f_res), la constante de la
        amplitud del campo que integra el simulador, y "quoted_s" =
        Q_L/(2 pi f_res).
    """
    return {
        "amplitude_s": Q_L / (math.pi * f_res),
        "quoted_s": Q_L / (2.0 * math.pi * f_res),
    }


def _verificar_paso(fres_t, ql_t, f_ro, dt):
    desintonia = float(np.max(np.abs(np.subtract.outer(np.atleast_1d(f_ro), fres_t))))
    tau_ring = float(np.min(2.0 * ql_t / (2.0 * np.pi * fres_t)))
    limite = tau_ring / MUESTRAS_POR_PERIODO
    if desintonia > 0:
        limite = min(limite, 1.0 / (MUESTRAS_POR_PERIODO * desintonia))
    if dt > limite * (1 + 1e-9):
        raise StepSizeError(f"dt = {dt:.3g} s supera el maximo {limite:.3g} s para esta desintonia y Q_L")


def _integrar_rk4(fres_t, ql_t, f_ro, drive, dt, q_c, s0):
    """RK4 de paso fijo, vectorizado sobre las frecuencias de lectura."""
    f_ro = np.atleast_1d(np.asarray(f_ro, dtype=float))
    n = len(fres_t)
    kappa = 2.0 * np.pi * fres_t / ql_t
    kappa_ext = 2.0 * np.pi * fres_t / q_c

    s = np.empty((len(f_ro), n), dtype=complex)
    s[:, 0] = s0
    actual = s[:, 0].copy()
    for k in range(n - 1):
        # Coeficientes en t_k, t_k + dt/2 y t_k + dt (interpolacion lineal)
        c0 = 2j * np.pi * (fres_t[k] - f_ro) - kappa[k] / 2.0
        c1 = 2j * np.pi * (fres_t[k + 1] - f_ro) - kappa[k + 1] / 2.0
        cm = 0.5 * (c0 + c1)
        # La ventana de lectura se mantiene constante en [t_k, t_k+1)
        b0 = 0.5 * kappa_ext[k] * drive[k]
        b1 = 0.5 * kappa_ext[k + 1] * drive[k]
        bm = 0.5 * (b0 + b1)

        k1 = c0 * actual + b0
        k2 = cm * (actual + 0.5 * dt * k1) + bm
        k3 = cm * (actual + 0.5 * dt * k2) + bm
        k4 = c1 * (actual + dt * k3) + b1
        actual = actual + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s[:, k + 1] = actual
    return s


def resonator_envelope(fres_t, ql_t, f_ro, drive, dt, q_c, s0=0j):
    """
    Integra la envolvente compleja del campo del resonador.

    fres_t y ql_t son las trayectorias f_res(t) y Q_L(t) en la grilla,
    drive la ventana w(t) en {0, 1} y q_c el Q de acoplamiento. Exige
    dt <= min(1/(20 |f_ro - f_res|max), tau_ring/20).

    Retorna:
        TimeTrace con t = 0, dt, 2 dt, ...
    """
    fres_t = np.asarray(fres_t, dtype=float)
    ql_t = np.broadcast_to(np.asarray(ql_t, dtype=float), fres_t.shape)
    drive = np.broadcast_to(np.asarray(drive, dtype=float), fres_t.shape)
    if fres_t.ndim != 1 or fres_t.size < 2:
        raise DomainError("f_res(t) debe ser un arreglo 1D de al menos dos muestras")
    if np.any(fres_t <= 0) or np.any(ql_t <= 0) or q_c <= 0:
        raise DomainError("f_res, Q_L y Q_c deben ser > 0")
    _verificar_paso(fres_t, ql_t, f_ro, dt)
    s = _integrar_rk4(fres_t, ql_t, float(f_ro), drive, dt, q_c, s0)
    return TimeTrace(np.arange(fres_t.size) * dt, s[0])


def _ruido_complejo(rng, forma, snr_db):
    sigma = 10.0 ** (-snr_db / 20.0) / math.sqrt(2.0)
    return sigma * (rng.standard_normal(forma) + 1j * rng.standard_normal(forma))


def simulate_map(seq, f_ro_list, model, baseline, dt, snr_db=None, seed=0,
                 biastee_fc=FC_BIASTEE, jobs=1):
    """
    Simula el mapa s_out(t, f_ro) del experimento pulsado.

    model puede ser None (sin respuesta al gate: f_res y Q_i constantes).
    Con snr_db se agrega ruido blanco gaussiano complejo reproducible con seed.
    jobs > 1 reparte las frecuencias de lectura entre hilos.

    Retorna:
        TimeMap
    """
    f_ro = np.atleast_1d(np.asarray(f_ro_list, dtype=float))
    if f_ro.size == 0:
        raise DomainError("la lista de frecuencias de lectura esta vacia")
    t = seq.time_grid(dt)
    w = seq.readout_window(t)

    if model is None:
        if seq.tiene_gate:
            logger.warning("[Simulacion] hay pulso de gate pero no modelo de respuesta; se ignora")
        vg = np.full_like(t, seq.gate_offset)
        fres_t = np.full_like(t, baseline.f_res0)
        qi_t = np.full_like(t, baseline.Q_i0)
    else:
        vg = seq.gate_offset + biastee_highpass(seq.gate_pulse(t), biastee_fc, dt)
        fres_t, qi_t = gate_relaxation(vg, model, dt)
    ql_t = 1.0 / (1.0 / qi_t + 1.0 / baseline.Q_c)

    _verificar_paso(fres_t, ql_t, f_ro, dt)

    bloques = np.array_split(np.arange(f_ro.size), max(1, min(int(jobs), f_ro.size)))
    if len(bloques) == 1:
        campo = _integrar_rk4(fres_t, ql_t, f_ro, w, dt, baseline.Q_c, 0j)
    else:
        with ThreadPoolExecutor(max_workers=len(bloques)) as pool:
            partes = list(pool.map(
                lambda idx: _integrar_rk4(fres_t, ql_t, f_ro[idx], w, dt, baseline.Q_c, 0j), bloques
            ))
        campo = np.vstack(partes)

    s_out = w[np.newaxis, :] - campo
    if snr_db is not None and np.isfinite(snr_db):
        rng = np.random.default_rng(seed)
        s_out = s_out + _ruido_complejo(rng, s_out.shape, snr_db)

    logger.info("[Simulacion] %d trazas de %d muestras (dt = %.3g s)", f_ro.size, t.size, dt)
    return TimeMap(t=t, f_ro=f_ro, s=s_out, fres_t=fres_t, ql_t=ql_t, vg_t=vg)


# =============================================================
# BANDAS LATERALES
# =============================================================

def _portador_y_pendiente(baseline, detuning):
    """(f del portador, |S21| en el portador, |dS21/df_res| en el portador)."""
    f_r = baseline.f_res0
    q_l = baseline.Q_L
    profundidad = q_l / baseline.Q_c
    f_portador = f_r + detuning
    y = 2.0 * q_l * (f_portador - f_r) / f_r
    portador = abs(1.0 - profundidad / (1.0 + 1j * y))
    pendiente = abs(profundidad * 1j / (1.0 + 1j * y) ** 2 * (-2.0 * q_l * f_portador / f_r ** 2))
    return f_portador, portador, pendiente


def sideband_response(f_g, mod_depth_freq, tau_eff, baseline, detuning=0.0,
                      resonator_filtering=False):
    """
    Espectro de portador y bandas laterales bajo modulacion continua del gate.

    La frecuencia de resonancia se modula con profundidad efectiva
    m(f_g) = mod_depth_freq / sqrt(1 + (2 pi f_g tau_eff)^2). Cada banda
    lateral tiene amplitud (m/2) |dS21/df_res| evaluada en el portador
    (f_r = f_res0 + detuning), asi que ambas bandas son iguales. Con
    resonator_filtering se agrega el corte propio del resonador a kappa/2.
    """
    if not f_g > 0:
        raise DomainError(f"f_g debe ser > 0, se recibio {f_g!r}")
    if not tau_eff > 0:
        raise DomainError(f"tau_eff debe ser > 0, se recibio {tau_eff!r}")
    f_r = baseline.f_res0
    q_l = baseline.Q_L
    ancho = f_r / q_l
    if abs(mod_depth_freq) > LIMITE_SENAL_PEQUENA * ancho:
        warnings.warn(
            f"modulacion de {mod_depth_freq:.3g} Hz no es pequena frente al ancho {ancho:.3g} Hz",
            SmallSignalWarning,
            stacklevel=2,
        )

    f_portador, portador, pendiente = _portador_y_pendiente(baseline, detuning)

    omega_g = 2.0 * math.pi * f_g
    m = abs(mod_depth_freq) / math.sqrt(1.0 + (omega_g * tau_eff) ** 2)
    banda = 0.5 * m * pendiente
    if resonator_filtering:
        medio_kappa = math.pi * f_r / q_l
        banda *= medio_kappa / math.hypot(medio_kappa, omega_g)

    amplitudes = [banda, portador, banda]
    return SidebandSpectrum(
        frequencies=[f_portador - f_g, f_portador, f_portador + f_g],
        amplitude=amplitudes,
        power_db=[20.0 * math.log10(a) if a > 0 else -math.inf for a in amplitudes],
    )


def _cruce_3db(f_g, amp_db, referencia_db):
    """Interpola en log10(f) el primer cruce 3 dB bajo referencia_db, el nivel con f_g -> 0."""
    nivel = referencia_db - 3.0
    debajo = np.nonzero(amp_db <= nivel)[0]
    if debajo.size == 0:
        raise NoCrossingError("la amplitud nunca cae 3 dB en el rango de f_g medido")
    i = int(debajo[0])
    if i == 0:
        raise NoCrossingError(f"el cruce de -3 dB queda bajo el primer f_g = {f_g[0]:.4g} Hz")
    x0, x1 = math.log10(f_g[i - 1]), math.log10(f_g[i])
    y0, y1 = amp_db[i - 1], amp_db[i]
    return 10.0 ** (x0 + (nivel - y0) * (x1 - x0) / (y1 - y0))


def sideband_sweep(f_g_list, mod_depth_freq, tau_eff, baseline, **opciones):
    """
    Barre f_g y extrae el punto de -3 dB de la amplitud de banda lateral.

    La amplitud se reporta relativa al portador (dB). El -3 dB se mide
    respecto del limite f_g -> 0 (m = |mod_depth_freq|, sin corte del
    resonador), no del primer punto del barrido.
    """
    f_g = np.asarray(f_g_list, dtype=float)
    if f_g.size < 2 or np.any(np.diff(f_g) <= 0):
        raise DomainError("f_g debe ser una lista estrictamente creciente de al menos dos puntos")
    if mod_depth_freq == 0:
        raise DomainError("mod_depth_freq debe ser distinto de cero")
    espectros = [sideband_response(fg, mod_depth_freq, tau_eff, baseline, **opciones) for fg in f_g]
    amp_db = np.array([e.sideband_to_carrier_db for e in espectros])
    _, portador, pendiente = _portador_y_pendiente(baseline, opciones.get("detuning", 0.0))
    referencia_db = 20.0 * math.log10(0.5 * abs(mod_depth_freq) * pendiente / portador)
    f_3db = _cruce_3db(f_g, amp_db, referencia_db)
    logger.info("[Bandas] f_-3dB = %.4g Hz (tau equivalente %.3g s)", f_3db, 1.0 / (2.0 * math.pi * f_3db))
    return SidebandSweep(f_g=f_g, amp_rel_db=amp_db, f_3db=f_3db, spectra=espectros)
