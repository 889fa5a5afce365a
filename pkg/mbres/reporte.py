"""
Resumenes legibles de cada corrida.

Los resumenes van al error estandar (la salida estandar queda para los
datos) y con --report se guardan tambien en un archivo de texto.
"""

import logging
import sys
from datetime import datetime
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

# --- CONFIGURACION ---

# Ancho minimo de las lineas de marco del reporte
ANCHO = 70

# Sangria del texto dentro de una seccion
SANGRIA = "  "


def _marco(titulo, ancho, marca):
    # Un titulo largo ensancha el marco en vez de salirse de el
    largo = max(ancho, len(titulo) + 2 * len(SANGRIA))
    return marca * largo


def seccion(titulo, ancho=ANCHO, marca="="):
    """Encabezado de seccion: titulo entre dos lineas de marca."""
    borde = _marco(titulo, ancho, marca)
    return "\n".join(["", borde, f"{SANGRIA}{titulo}", borde])


def subseccion(titulo, marca="-"):
    """Subtitulo subrayado con el largo exacto del titulo."""
    return "\n".join(["", f"{SANGRIA}{titulo}", f"{SANGRIA}{marca * len(titulo)}"])


def encabezado(comando, version, ahora=None):
    ahora = ahora or datetime.now()
    titulo = f"MBRES {version} - comando: {comando}"
    borde = _marco(titulo, ANCHO, "*")
    return "\n".join([
        borde,
        f"{SANGRIA}{titulo}",
        f"{SANGRIA}Generado el: {ahora.strftime('%Y-%m-%d %H:%M:%S')}",
        borde,
    ])


def pie():
    return "\n".join(["", "-" * ANCHO, f"{SANGRIA}Fin del reporte.", "-" * ANCHO])


def generar_resumen_config(config):
    """Parametros del material y del resonador usados en la corrida."""
    lineas = [seccion("CONFIGURACION")]
    lineas.append("")
    lineas.append(f"  T_c = {config.material.T_c:.4g} K, tau0 = {config.material.tau0:.4g} s")
    n0 = "sin valor" if config.material.N0 is None else f"{config.material.N0:.4g}"
    lineas.append(f"  N0 = {n0}")
    b = config.baseline
    lineas.append(f"  f_res0 = {b.f_res0:.10g} Hz, Q_i0 = {b.Q_i0:.5g}, Q_c = {b.Q_c:.5g}, alpha = {b.alpha:.4g}")
    lineas.append(f"  T_ref = {config.T_ref:.4g} K, semilla = {config.seed}")
    return "\n".join(lineas)


def generar_resumen_tabla(tabla, titulo=None):
    """Rango de cada columna de una tabla de salida."""
    lineas = [seccion(titulo or f"TABLA {tabla.schema.upper()}")]
    lineas.append("")
    lineas.append(f"  Filas: {len(tabla)}")
    for nombre in tabla.names:
        valores = tabla[nombre]
        finitos = valores[np.isfinite(valores)]
        if finitos.size == 0:
            lineas.append(f"  - {nombre}: sin valores finitos")
            continue
        lineas.append(f"  - {nombre}: {finitos.min():.6g} .. {finitos.max():.6g}")
    return "\n".join(lineas)


def generar_resumen_ajuste(titulo, registro):
    """Lineas clave=valor de un ajuste."""
    lineas = [seccion(f"AJUSTE {titulo.upper()}")]
    lineas.append("")
    for linea in registro:
        lineas.append(f"  {linea}")
    return "\n".join(lineas)


def generar_avisos_filas(avisos):
    """Filas marcadas durante un procesamiento por lote."""
    marcadas = [(i, motivo) for i, motivo in enumerate(avisos) if motivo]
    lineas = [subseccion(f"Filas marcadas: {len(marcadas)} de {len(avisos)}")]
    for i, motivo in marcadas:
        lineas.append(f"    fila {i}: {motivo}")
    return "\n".join(lineas)


def mostrar_reporte(secciones, ruta=None, silencioso=False, flujo=None):
    """
    Une las secciones y las escribe en flujo (por defecto el error estandar).

    Con ruta el reporte se guarda tambien en un archivo de texto; silencioso
    solo calla el flujo, el archivo se escribe igual.

    Retorna:
        str con el reporte completo
    """
    reporte = "\n".join(secciones)
    if not silencioso:
        flujo = flujo if flujo is not None else sys.stderr
        flujo.write(reporte + "\n")
        flujo.flush()
    if ruta is not None:
        ruta = Path(ruta)
        ruta.parent.mkdir(parents=True, exist_ok=True)
        ruta.write_text(reporte + "\n", encoding="utf-8")
        logger.info("[Reporte] guardado en %s", ruta)
    return reporte
