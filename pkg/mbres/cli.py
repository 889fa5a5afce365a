"""
Linea de comandos de mbres.

Uso:
    python main.py <comando> [--config FILE] [--out PATH] [--seed N] [--units GHz,mK,ns]
    python -m mbres <comando> ...

Los datos van a archivos (--out) o a la salida estandar; los mensajes y
resumenes van al error estandar.

Codigos de salida:
    0  todo bien
    1  alguna fila quedo marcada y se pidio --strict
    2  error de configuracion, de entrada o de dominio
    3  error numerico en un ajuste
"""

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from mbres import __version__
from mbres.config import cargar_config
from mbres.dynamics import (
    PulseSequence,
    ring_time_constants,
    sideband_sweep,
    simulate_map,
)
from mbres.errores import DomainError, FitError, MbresError
from mbres.fitting import (
    circle_fit,
    exp_fit,
    fit_gate_edges,
    fit_ring_up,
    lorentzian_fit,
    mb_fit,
    notch_s21,
)
from mbres.mattis_bardeen import QuasiparticleDensity, sigma_ratio
from mbres.reporte import (
    encabezado,
    generar_avisos_filas,
    generar_resumen_ajuste,
    generar_resumen_config,
    generar_resumen_tabla,
    mostrar_reporte,
    pie,
    seccion,
)
from mbres.resonator import (
    freq_shift,
    invert_loss_series,
    loss_shift,
    qp_recombination_time_generic,
    qp_recombination_time_thermal,
    shifts_from_gate_sweep,
    sin_avisos_validez,
    tau_qp_at_teff,
)
from mbres.tablas import (
    guardar_tabla,
    leer_tabla,
    metadatos_generador,
    nueva_tabla,
)

logger = logging.getLogger(__name__)

# --- CONFIGURACION ---

SALIDA_OK = 0
SALIDA_FILAS_MARCADAS = 1
SALIDA_ENTRADA = 2
SALIDA_AJUSTE = 3

# Grilla por defecto de temperaturas (K) y de modulacion del gate (Hz)
GRILLA_T = "0.05:1.0:20"
GRILLA_FG = "1e5:2.5e7:60:log"

# Frecuencias de lectura por defecto: f_res0 +/- 2.5 anchos de linea
PUNTOS_F_RO = 41
ANCHOS_F_RO = 2.5

# Traza S21 sintetica por defecto
PUNTOS_S21 = 2001
ANCHOS_S21 = 6.0

# Paso temporal de integracion por defecto (s)
PASO_DEFECTO = 1e-9


@dataclass
class Resultado:
    """Lo que produce un comando: tablas a guardar, lineas para stdout y secciones del reporte."""

    tablas: dict = field(default_factory=dict)
    registro: list = field(default_factory=list)
    secciones: list = field(default_factory=list)
    avisos: list = field(default_factory=list)


# =============================================================
# GRILLAS Y UNIDADES
# =============================================================

def parse_grid(texto, factor=1.0):
    """
    "a:b:n" -> n puntos lineales entre a y b; "a:b:n:log" -> logaritmicos;
    "a,b,c" -> lista explicita. Todo multiplicado por factor (unidad -> SI).
    """
    texto = texto.strip()
    try:
        if ":" in texto:
            partes = texto.split(":")
            if len(partes) not in (3, 4) or (len(partes) == 4 and partes[3] != "log"):
                raise ValueError(texto)
            inicio, fin, n = float(partes[0]), float(partes[1]), int(partes[2])
            if n < 1:
                raise ValueError(texto)
            if len(partes) == 4:
                if inicio <= 0 or fin <= 0:
                    raise DomainError(f"grilla logaritmica con limites no positivos: {texto}")
                grilla = np.logspace(math.log10(inicio), math.log10(fin), n)
            else:
                grilla = np.linspace(inicio, fin, n)
        else:
            grilla = np.array([float(v) for v in texto.split(",") if v.strip()])
    except ValueError:
        raise DomainError(f"grilla invalida: {texto!r} (use a:b:n, a:b:n:log o a,b,c)") from None
    if grilla.size == 0:
        raise DomainError("la grilla esta vacia")
    return grilla * factor


def _valor(config, magnitud, valor):
    return None if valor is None else config.units.to_si(magnitud, valor)


# =============================================================
# COMANDOS
# =============================================================

def cmd_conductivity(config, T, f=None):
    """Tabla T_K, s1, s2 a la frecuencia f (por defecto f_res0)."""
    f = config.baseline.f_res0 if f is None else f
    razon = sigma_ratio(np.asarray(T, dtype=float), f, config.material)
    tabla = nueva_tabla(
        "conductivity",
        {"T_K": T, "s1": np.atleast_1d(razon.s1), "s2": np.atleast_1d(razon.s2)},
        {"f_Hz": f"{f:.17g}", "Tc_K": config.material.T_c},
    ).validar()
    return Resultado(tablas={"conductivity": tabla}, secciones=[generar_resumen_tabla(tabla, "CONDUCTIVIDAD")])


def cmd_response(config, T):
    """Barrido del modelo directo: T_K, dff, dinvQ, fres_Hz, Qi."""
    T = np.asarray(T, dtype=float)
    b = config.baseline
    dff = np.atleast_1d(freq_shift(T, b, config.material, config.T_ref))
    dinvq = np.atleast_1d(loss_shift(T, b, config.material, config.T_ref))
    tabla = nueva_tabla(
        "response",
        {"T_K": T, "dff": dff, "dinvQ": dinvq, "fres_Hz": b.f_res0 * (1.0 + dff), "Qi": 1.0 / (1.0 / b.Q_i0 + dinvq)},
        {"alpha": b.alpha, "Tc_K": config.material.T_c, "T_ref_K": config.T_ref},
    ).validar()
    return Resultado(tablas={"response": tabla}, secciones=[generar_resumen_tabla(tabla, "RESPUESTA")])


def _columna_perdida(tabla):
    x = tabla[tabla.names[0]]
    return x, tabla["dinvQ"]


def cmd_teff(config, tabla):
    """
    Temperatura efectiva y dff predicho para cada fila (x, dinvQ).

    x es la primera columna de la tabla (V_g, T_K o lo que sea). Las filas
    fuera de rango quedan como NaN y marcadas; la corrida sigue.
    """
    x, dinvq = _columna_perdida(tabla)
    temperaturas, predichos, avisos = invert_loss_series(dinvq, config.baseline, config.material, config.T_ref)
    salida = nueva_tabla(
        "teff",
        {"x": x, "dinvQ": dinvq, "Teff_K": temperaturas, "dff_pred": predichos},
        {"x_column": tabla.names[0], "T_ref_K": config.T_ref},
    )
    secciones = [generar_resumen_tabla(salida, "TEMPERATURA EFECTIVA"), generar_avisos_filas(avisos)]
    return Resultado(tablas={"teff": salida}, secciones=secciones, avisos=avisos)


def cmd_tauqp(config, T=None, nqp=None, loss_table=None):
    """Tiempo de recombinacion desde una grilla T, una columna n_qp o una tabla de perdidas."""
    if sum(v is not None for v in (T, nqp, loss_table)) != 1:
        raise DomainError("tauqp necesita exactamente una de: grilla T, columna n_qp o tabla de perdidas")
    metadatos = {"tau0_s": config.material.tau0, "Tc_K": config.material.T_c}
    avisos = []
    if T is not None:
        tau = np.atleast_1d(qp_recombination_time_thermal(np.asarray(T, dtype=float), config.material))
        tabla = nueva_tabla("tauqp", {"T_K": T, "tauqp_s": tau}, metadatos)
    elif nqp is not None:
        tau = np.atleast_1d(qp_recombination_time_generic(QuasiparticleDensity(np.asarray(nqp, dtype=float)), config.material))
        tabla = nueva_tabla("tauqp_nqp", {"nqp": nqp, "tauqp_s": tau}, metadatos)
    else:
        x, dinvq = _columna_perdida(loss_table)
        temperaturas, taus = tau_qp_at_teff(dinvq, config.baseline, config.material, config.T_ref)
        avisos = [None if math.isfinite(t) else "fuera de rango" for t in temperaturas]
        tabla = nueva_tabla("tauqp_loss", {"x": x, "dinvQ": dinvq, "Teff_K": temperaturas, "tauqp_s": taus}, metadatos)
    return Resultado(tablas={"tauqp": tabla}, secciones=[generar_resumen_tabla(tabla, "TIEMPO DE RECOMBINACION")], avisos=avisos)


def _secuencia(config, sin_gate=False, amplitud=None):
    seq = config.sequence or PulseSequence.reference()
    if sin_gate:
        return seq.with_gate(0.0)
    if amplitud is not None:
        return seq.with_gate(amplitud)
    return seq


def _f_ro_defecto(config):
    b = config.baseline
    ancho = b.f_res0 / b.Q_L
    return b.f_res0 + np.linspace(-ANCHOS_F_RO, ANCHOS_F_RO, PUNTOS_F_RO) * ancho


def _tabla_traza(t, s, metadatos):
    return nueva_tabla("trace", {"t_s": t, "re": s.real, "im": s.imag}, metadatos)


def cmd_simulate(config, f_ro=None, dt=PASO_DEFECTO, snr_db=None, sin_gate=False, jobs=1, ajustar_flancos=False):
    """
    Simula el mapa s_out(t, f_ro) de la secuencia pulsada.

    Retorna una tabla "trace_<i>" por frecuencia de lectura y la tabla "map".
    """
    seq = _secuencia(config, sin_gate)
    f_ro = _f_ro_defecto(config) if f_ro is None else np.atleast_1d(f_ro)
    modelo = config.gate_model() if seq.tiene_gate else None
    mapa = simulate_map(seq, f_ro, modelo, config.baseline, dt, snr_db=snr_db, seed=config.seed,
                        biastee_fc=config.gate.biastee_fc, jobs=jobs)

    base = metadatos_generador(config.seed, snr_db, dt_s=dt, gate_amplitude_V=seq.gate_amplitude if seq.tiene_gate else 0.0)
    tablas = {}
    for i, f in enumerate(mapa.f_ro):
        tablas[f"trace_{i:03d}"] = _tabla_traza(mapa.t, mapa.s[i], {**base, "f_ro_Hz": f"{f:.17g}"})
    n_t = mapa.t.size
    tablas["map"] = nueva_tabla(
        "map",
        {
            "t_s": np.tile(mapa.t, mapa.f_ro.size),
            "f_ro_Hz": np.repeat(mapa.f_ro, n_t),
            "re": mapa.s.real.ravel(),
            "im": mapa.s.imag.ravel(),
        },
        base,
    )

    b = config.baseline
    tiempos = ring_time_constants(b.f_res0, b.Q_L)
    secciones = [seccion("SIMULACION")]
    secciones.append(f"\n  {mapa.f_ro.size} frecuencias de lectura, {n_t} muestras, dt = {dt:.3g} s")
    secciones.append(f"  Ring-up: 2/kappa = {tiempos['amplitude_s']:.4g} s, Q_L/(2 pi f_res) = {tiempos['quoted_s']:.4g} s")

    centro = int(np.argmin(np.abs(mapa.f_ro - b.f_res0)))
    try:
        ring = fit_ring_up(mapa.trace(centro), seq, mapa.f_ro[centro], b.Q_L)
        secciones.append(f"  Ring-up ajustado: tau = {ring.tau:.4g} s (razon a 2/kappa: {ring.ratio:.3f})")
    except FitError as e:
        logger.warning("[Simulacion] no se pudo ajustar el ring-up: %s", e)

    if ajustar_flancos and seq.tiene_gate:
        negativo = simulate_map(seq.with_gate(-seq.gate_amplitude), [b.f_res0], modelo, b, dt,
                                seed=config.seed, biastee_fc=config.gate.biastee_fc)
        positivo = simulate_map(seq, [b.f_res0], modelo, b, dt, seed=config.seed, biastee_fc=config.gate.biastee_fc)
        flancos = fit_gate_edges(positivo.trace(0), negativo.trace(0), seq)
        secciones.append(f"  Flancos del gate: tau_R = {flancos.tau_R:.4g} s, tau_F = {flancos.tau_F:.4g} s")
    return Resultado(tablas=tablas, secciones=secciones)


def cmd_sidebands(config, tau_eff, f_g, mod_depth=None, resonator_filtering=False):
    """Amplitud de banda lateral versus f_g y su punto de -3 dB."""
    b = config.baseline
    if mod_depth is None:
        mod_depth = 0.01 * b.f_res0 / b.Q_L
    barrido = sideband_sweep(f_g, mod_depth, tau_eff, b, resonator_filtering=resonator_filtering)
    tabla = nueva_tabla(
        "sidebands",
        {"fg_Hz": barrido.f_g, "amp_rel_dB": barrido.amp_rel_db},
        {"tau_eff_s": tau_eff, "mod_depth_Hz": mod_depth, "f_3dB_Hz": f"{barrido.f_3db:.17g}"},
    ).validar()
    registro = [f"f_3dB_Hz={barrido.f_3db:.10g}", f"tau_equiv_s={1.0 / (2.0 * math.pi * barrido.f_3db):.6g}"]
    secciones = [generar_resumen_tabla(tabla, "BANDAS LATERALES"), generar_resumen_ajuste("punto de -3 dB", registro)]
    return Resultado(tablas={"sidebands": tabla}, registro=registro, secciones=secciones)


def _tabla_residuos(x, fit):
    residuos = np.asarray(fit.residuals)
    if residuos.size == 2 * np.size(x):
        # datos complejos: parte real y luego imaginaria
        x = np.concatenate([x, x])
    return nueva_tabla("residuals", {"x": x, "residual": residuos})


def _referencia_ajuste(config, T, t_ref):
    """Referencia del ajuste mb: la pedida, o la de la config si cae bajo la serie, o la menor T."""
    if t_ref is not None:
        return t_ref
    return config.T_ref if config.T_ref <= float(np.min(T)) else None


def cmd_fit(config, tipo, tabla_entrada, opciones=None):
    """
    Ajusta una tabla de entrada.

    tipo: "circle" (freq_Hz,re,im), "lorentzian" (freq_Hz,re,im; ajusta
    |s|^2 o |s| con magnitude=True), "exp" (t_s,re,im; ajusta |s|) o "mb"
    (T_K,dff,dinvQ).
    """
    opciones = opciones or {}
    if tipo == "circle":
        f, z = tabla_entrada["freq_Hz"], tabla_entrada["re"] + 1j * tabla_entrada["im"]
        circulo, fit = circle_fit(f, z)
        registro = circulo.as_record() + [f"converged={str(fit.converged).lower()}", f"iterations={fit.iterations}"]
        x = f
    elif tipo == "lorentzian":
        f = tabla_entrada["freq_Hz"]
        z = tabla_entrada["re"] + 1j * tabla_entrada["im"]
        y = np.abs(z) if opciones.get("magnitude") else np.abs(z) ** 2
        params, fit = lorentzian_fit(f, y)
        registro = fit.as_record() + [f"Ql_hwhm={params.Q_L_hwhm:.8g}", f"Ql_fwhm={params.Q_L_fwhm:.8g}"]
        x = f
    elif tipo == "exp":
        t = tabla_entrada["t_s"]
        y = np.abs(tabla_entrada["re"] + 1j * tabla_entrada["im"])
        t0 = opciones.get("t0")
        t0 = float(t[0]) if t0 is None else t0
        sel = t >= t0
        if not np.any(sel):
            raise DomainError(f"no hay muestras con t >= t0 = {t0}")
        A = opciones.get("A")
        A = float(y[sel][0]) if A is None else A
        params, fit = exp_fit(t[sel], y[sel], t0, A)
        registro = [f"A={params.A:.10g}", f"t0_s={params.t0:.10g}"] + fit.as_record()
        x = t[sel]
    elif tipo == "mb":
        T = tabla_entrada["T_K"]
        fit = mb_fit(
            T, tabla_entrada["dff"], tabla_entrada["dinvQ"],
            f_res=opciones.get("f_res") or config.baseline.f_res0,
            mode=opciones.get("mode", "joint"),
            t_ref=_referencia_ajuste(config, T, opciones.get("t_ref")),
            tau0=config.material.tau0,
            weighting=opciones.get("weighting", "uniform"),
        )
        registro = fit.as_record()
        x = T if opciones.get("mode", "joint") in ("dff", "dinvq") else None
        if x is None:
            x = np.arange(fit.residuals.size, dtype=float)
    else:
        raise DomainError(f"tipo de ajuste desconocido: {tipo!r}")

    return Resultado(
        tablas={"residuals": _tabla_residuos(x, fit)},
        registro=registro,
        secciones=[generar_resumen_ajuste(tipo, registro)],
    )


def cmd_gen(config, tipo, snr_db=None, opciones=None):
    """
    Datos sinteticos reproducibles: "s21", "timetrace" o "response".

    Los parametros verdaderos quedan en los metadatos de la tabla. Con
    snr_db = None no hay ruido. En "response" el ruido es multiplicativo
    con nivel relativo 10^(-snr/20).
    """
    opciones = opciones or {}
    rng = np.random.default_rng(config.seed)
    b = config.baseline
    if tipo == "s21":
        phi = opciones.get("phi", 0.0)
        delay = opciones.get("delay", 0.0)
        ancho = b.f_res0 / b.Q_L
        puntos = opciones.get("points", PUNTOS_S21)
        f = b.f_res0 + np.linspace(-ANCHOS_S21, ANCHOS_S21, puntos) * ancho
        z = notch_s21(f, b.f_res0, b.Q_i0, b.Q_c, phi=phi, delay=delay)
        if snr_db is not None:
            sigma = 10.0 ** (-snr_db / 20.0) / math.sqrt(2.0)
            z = z + sigma * (rng.standard_normal(f.size) + 1j * rng.standard_normal(f.size))
        metadatos = metadatos_generador(config.seed, snr_db, fres_Hz=b.f_res0, Qi=b.Q_i0, Qc=b.Q_c, phi_rad=phi, delay_s=delay)
        tabla = nueva_tabla("s21", {"freq_Hz": f, "re": z.real, "im": z.imag}, metadatos)
    elif tipo == "timetrace":
        seq = _secuencia(config, opciones.get("no_gate", False))
        f_ro = opciones.get("f_ro") or b.f_res0
        dt = opciones.get("dt", PASO_DEFECTO)
        modelo = config.gate_model() if seq.tiene_gate else None
        mapa = simulate_map(seq, [f_ro], modelo, b, dt, snr_db=snr_db, seed=config.seed, biastee_fc=config.gate.biastee_fc)
        metadatos = metadatos_generador(
            config.seed, snr_db, f_ro_Hz=f_ro, fres0_Hz=b.f_res0, Qi0=b.Q_i0, Qc=b.Q_c,
            tau_R_s=config.gate.tau_R, tau_F_s=config.gate.tau_F,
            gate_amplitude_V=seq.gate_amplitude if seq.tiene_gate else 0.0,
        )
        tabla = _tabla_traza(mapa.t, mapa.s[0], metadatos)
    elif tipo == "response":
        T = opciones.get("T")
        T = parse_grid(GRILLA_T) if T is None else np.asarray(T, dtype=float)
        with sin_avisos_validez():
            dff = np.atleast_1d(freq_shift(T, b, config.material, config.T_ref))
            dinvq = np.atleast_1d(loss_shift(T, b, config.material, config.T_ref))
        if snr_db is not None:
            nivel = 10.0 ** (-snr_db / 20.0)
            dff = dff * (1.0 + nivel * rng.standard_normal(T.size))
            dinvq = dinvq * (1.0 + nivel * rng.standard_normal(T.size))
        metadatos = metadatos_generador(config.seed, snr_db, alpha=b.alpha, Tc_K=config.material.T_c, T_ref_K=config.T_ref)
        tabla = nueva_tabla(
            "response",
            {"T_K": T, "dff": dff, "dinvQ": dinvq, "fres_Hz": b.f_res0 * (1.0 + dff), "Qi": 1.0 / (1.0 / b.Q_i0 + dinvq)},
            metadatos,
        )
    else:
        raise DomainError(f"tipo de datos sinteticos desconocido: {tipo!r}")
    return Resultado(tablas={tipo: tabla}, secciones=[generar_resumen_tabla(tabla, f"DATOS SINTETICOS {tipo.upper()}")])


def cmd_shifts(config, tabla_gate):
    """Barrido de gate medido (Vg_V, fres_Hz, Qi[, Ig_A]) -> x, dinvQ, dff."""
    vg = tabla_gate["Vg_V"]
    ig = tabla_gate["Ig_A"] if "Ig_A" in tabla_gate.names else None
    dff, dinvq = shifts_from_gate_sweep(vg, tabla_gate["fres_Hz"], tabla_gate["Qi"], ig)
    columnas = {"x": vg, "dinvQ": dinvq, "dff": dff}
    extra = ()
    if ig is not None:
        columnas["Ig_A"] = ig
        extra = ("Ig_A",)
    tabla = nueva_tabla("shifts", columnas, {"x_column": "Vg_V"}, extra=extra)
    return Resultado(tablas={"shifts": tabla}, secciones=[generar_resumen_tabla(tabla, "DESPLAZAMIENTOS DEL GATE")])


# =============================================================
# ARGUMENTOS
# =============================================================

def _opciones_comunes():
    comun = argparse.ArgumentParser(add_help=False)
    comun.add_argument("--config", type=Path, help="archivo TOML de configuracion")
    comun.add_argument("--out", help="archivo (o carpeta para simulate) de salida; por defecto stdout")
    comun.add_argument("--seed", type=int, help="semilla del generador (sobrescribe la config)")
    comun.add_argument("--units", help="unidades de los valores de la linea de comandos, p. ej. GHz,mK,ns")
    comun.add_argument("--report", type=Path, help="guarda el resumen legible en este archivo")
    comun.add_argument("--strict", action="store_true", help="codigo de salida 1 si alguna fila queda marcada")
    nivel = comun.add_mutually_exclusive_group()
    nivel.add_argument("-q", "--quiet", action="store_true", help="solo advertencias y errores")
    nivel.add_argument("-v", "--verbose", action="store_true", help="mensajes de depuracion")
    return comun


def construir_parser():
    comun = _opciones_comunes()
    parser = argparse.ArgumentParser(
        prog="mbres",
        description="Modelo de Mattis-Bardeen, simulacion temporal y ajustes para resonadores superconductores.",
    )
    parser.add_argument("--version", action="version", version=f"mbres {__version__}")
    sub = parser.add_subparsers(dest="comando", required=True)

    p = sub.add_parser("conductivity", parents=[comun], help="sigma1/sigma_n y sigma2/sigma_n versus T")
    p.add_argument("--T", default=GRILLA_T, help="grilla de temperatura (a:b:n o a,b,c)")
    p.add_argument("--freq", type=float, help="frecuencia (por defecto f_res0)")

    p = sub.add_parser("response", parents=[comun], help="dff, dinvQ, f_res, Q_i versus T")
    p.add_argument("--T", default=GRILLA_T, help="grilla de temperatura")

    p = sub.add_parser("teff", parents=[comun], help="temperatura efectiva desde una columna dinvQ")
    p.add_argument("input", type=Path, help="CSV con la columna x (primera) y dinvQ")

    p = sub.add_parser("tauqp", parents=[comun], help="tiempo de recombinacion de cuasiparticulas")
    grupo = p.add_mutually_exclusive_group()
    grupo.add_argument("--T", help="grilla de temperatura")
    grupo.add_argument("--nqp", help="CSV con columna nqp (necesita material.N0)")
    grupo.add_argument("--from-loss", type=Path, help="CSV con x, dinvQ: tau_qp en la T efectiva")

    p = sub.add_parser("simulate", parents=[comun], help="mapa temporal s_out(t, f_ro) de la secuencia pulsada")
    p.add_argument("--f-ro", help="grilla de frecuencias de lectura")
    p.add_argument("--dt", type=float, help="paso temporal (en la unidad de tiempo; por defecto 1 ns)")
    p.add_argument("--snr", type=float, help="SNR en dB del ruido agregado")
    p.add_argument("--no-gate", action="store_true", help="sin pulso de gate")
    p.add_argument("--jobs", type=int, default=1, help="hilos para repartir las frecuencias de lectura")
    p.add_argument("--fit-edges", action="store_true", help="ajusta tau_R y tau_F sobre pulsos +/-A_g")

    p = sub.add_parser("sidebands", parents=[comun], help="bandas laterales versus f_g y punto de -3 dB")
    p.add_argument("--tau-eff", type=float, required=True, help="tiempo de respuesta efectivo del gate")
    p.add_argument("--fg", default=GRILLA_FG, help="grilla de f_g (en Hz salvo --units)")
    p.add_argument("--mod-depth", type=float, help="profundidad de modulacion en frecuencia")
    p.add_argument("--resonator-filtering", action="store_true", help="incluye el corte propio del resonador")

    p = sub.add_parser("fit", parents=[comun], help="ajustes: circle, lorentzian, exp, mb")
    p.add_argument("kind", choices=["circle", "lorentzian", "exp", "mb"])
    p.add_argument("input", type=Path, help="CSV de entrada")
    p.add_argument("--residuals", type=Path, help="guarda los residuos en este CSV")
    p.add_argument("--magnitude", action="store_true", help="lorentzian: ajusta |s| en vez de |s|^2")
    p.add_argument("--t0", type=float, help="exp: inicio del decaimiento")
    p.add_argument("--A", type=float, help="exp: valor inicial fijo (por defecto la primera muestra)")
    p.add_argument("--mode", default="joint", choices=["joint", "dff", "dinvq", "averaged"], help="mb: canales")
    p.add_argument("--weighting", default="uniform", choices=["uniform", "relative"], help="mb: ponderacion")
    p.add_argument("--t-ref", type=float, help="mb: temperatura de referencia (por defecto la menor T)")

    p = sub.add_parser("gen", parents=[comun], help="datos sinteticos reproducibles")
    p.add_argument("kind", choices=["s21", "timetrace", "response"])
    p.add_argument("--snr", type=float, help="SNR en dB (sin ruido si se omite)")
    p.add_argument("--phi", type=float, default=0.0, help="s21: angulo de desadaptacion (rad)")
    p.add_argument("--delay", type=float, default=0.0, help="s21: retardo del cable (en la unidad de tiempo)")
    p.add_argument("--points", type=int, default=PUNTOS_S21, help="s21: cantidad de puntos")
    p.add_argument("--f-ro", type=float, help="timetrace: frecuencia de lectura")
    p.add_argument("--dt", type=float, help="timetrace: paso temporal (por defecto 1 ns)")
    p.add_argument("--no-gate", action="store_true", help="timetrace: sin pulso de gate")
    p.add_argument("--T", help="response: grilla de temperatura")

    p = sub.add_parser("shifts", parents=[comun], help="dff y dinvQ desde un barrido de gate medido")
    p.add_argument("input", type=Path, help="CSV Vg_V,fres_Hz,Qi[,Ig_A]")
    return parser


def configurar_logging(args):
    nivel = logging.INFO
    if args.quiet:
        nivel = logging.WARNING
    elif args.verbose:
        nivel = logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=nivel, format="[%(levelname)s] %(message)s", force=True)
    logging.captureWarnings(True)


def _paso(config, dt):
    """--dt en la unidad de tiempo declarada; sin valor es 1 ns."""
    return PASO_DEFECTO if dt is None else config.units.to_si("time", dt)


def ejecutar(args):
    config = cargar_config(args.config, args.units)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    u = config.units
    c = args.comando

    if c == "conductivity":
        return config, cmd_conductivity(config, parse_grid(args.T, u.factor("temp")), _valor(config, "freq", args.freq))
    if c == "response":
        return config, cmd_response(config, parse_grid(args.T, u.factor("temp")))
    if c == "teff":
        return config, cmd_teff(config, leer_tabla(args.input, requeridas=("dinvQ",)))
    if c == "tauqp":
        if args.nqp:
            return config, cmd_tauqp(config, nqp=leer_tabla(args.nqp, requeridas=("nqp",))["nqp"])
        if args.from_loss:
            return config, cmd_tauqp(config, loss_table=leer_tabla(args.from_loss, requeridas=("dinvQ",)))
        return config, cmd_tauqp(config, T=parse_grid(args.T or GRILLA_T, u.factor("temp")))
    if c == "simulate":
        f_ro = None if args.f_ro is None else parse_grid(args.f_ro, u.factor("freq"))
        return config, cmd_simulate(config, f_ro, _paso(config, args.dt), args.snr, args.no_gate,
                                    args.jobs, args.fit_edges)
    if c == "sidebands":
        return config, cmd_sidebands(
            config, u.to_si("time", args.tau_eff), parse_grid(args.fg, u.factor("freq")),
            _valor(config, "freq", args.mod_depth), args.resonator_filtering,
        )
    if c == "fit":
        requeridas = {"circle": ("freq_Hz", "re", "im"), "lorentzian": ("freq_Hz", "re", "im"),
                      "exp": ("t_s", "re", "im"), "mb": ("T_K", "dff", "dinvQ")}[args.kind]
        opciones = {
            "magnitude": args.magnitude,
            "t0": _valor(config, "time", args.t0),
            "A": args.A,
            "mode": args.mode,
            "weighting": args.weighting,
            "t_ref": _valor(config, "temp", args.t_ref),
        }
        return config, cmd_fit(config, args.kind, leer_tabla(args.input, requeridas=requeridas), opciones)
    if c == "gen":
        opciones = {
            "phi": args.phi,
            "delay": u.to_si("time", args.delay),
            "points": args.points,
            "f_ro": _valor(config, "freq", args.f_ro),
            "dt": _paso(config, args.dt),
            "no_gate": args.no_gate,
            "T": None if args.T is None else parse_grid(args.T, u.factor("temp")),
        }
        return config, cmd_gen(config, args.kind, args.snr, opciones)
    if c == "shifts":
        return config, cmd_shifts(config, leer_tabla(args.input, requeridas=("Vg_V", "fres_Hz", "Qi"), schema="gate"))
    raise DomainError(f"comando desconocido: {c}")


def _guardar_salidas(args, resultado):
    if args.comando == "simulate":
        carpeta = Path(args.out or "simulacion")
        carpeta.mkdir(parents=True, exist_ok=True)
        for nombre, tabla in resultado.tablas.items():
            guardar_tabla(tabla, carpeta / f"{nombre}.csv")
        return
    if args.comando == "fit":
        if args.residuals is not None:
            guardar_tabla(resultado.tablas["residuals"], args.residuals)
        destino = sys.stdout if args.out in (None, "-") else open(args.out, "w", encoding="utf-8")
        try:
            for linea in resultado.registro:
                destino.write(linea + "\n")
        finally:
            if destino is not sys.stdout:
                destino.close()
        return
    for tabla in resultado.tablas.values():
        guardar_tabla(tabla, args.out)
    if args.comando == "sidebands" and args.out not in (None, "-"):
        for linea in resultado.registro:
            print(linea)


def main(argv=None):
    """
    Punto de entrada: parsea argumentos, ejecuta el comando y guarda las salidas.

    Retorna el codigo de salida.
    """
    parser = construir_parser()
    args = parser.parse_args(argv)
    configurar_logging(args)

    try:
        config, resultado = ejecutar(args)
        _guardar_salidas(args, resultado)
    except FitError as e:
        logger.error("[%s] ajuste fallido: %s", args.comando, e)
        return SALIDA_AJUSTE
    except (MbresError, ValueError) as e:
        logger.error("[%s] %s", args.comando, e)
        return SALIDA_ENTRADA

    secciones = [encabezado(args.comando, __version__), generar_resumen_config(config)]
    secciones.extend(resultado.secciones)
    secciones.append(pie())
    mostrar_reporte(secciones, args.report, silencioso=args.quiet)

    marcadas = sum(1 for a in resultado.avisos if a)
    if marcadas:
        logger.warning("[%s] %d fila(s) marcada(s)", args.comando, marcadas)
        if args.strict:
            return SALIDA_FILAS_MARCADAS
    return SALIDA_OK
