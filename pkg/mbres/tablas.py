"""
Lectura y escritura de las tablas CSV.

Formato: lineas de metadatos "# clave = valor" al inicio, una linea de
encabezado con las unidades en el nombre de la columna (T_K, fres_Hz) y
luego las filas. Los numeros se escriben con 17 cifras significativas para
que leer y volver a escribir una tabla no cambie ningun valor.
"""

import csv
import io
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from mbres.errores import TableError

logger = logging.getLogger(__name__)

# --- CONFIGURACION ---

# Encabezados exactos de cada esquema
ESQUEMAS = {
    "conductivity": ["T_K", "s1", "s2"],
    "response": ["T_K", "dff", "dinvQ", "fres_Hz", "Qi"],
    "teff": ["x", "dinvQ", "Teff_K", "dff_pred"],
    "tauqp": ["T_K", "tauqp_s"],
    "tauqp_nqp": ["nqp", "tauqp_s"],
    "tauqp_loss": ["x", "dinvQ", "Teff_K", "tauqp_s"],
    "sidebands": ["fg_Hz", "amp_rel_dB"],
    "s21": ["freq_Hz", "re", "im"],
    "trace": ["t_s", "re", "im"],
    "map": ["t_s", "f_ro_Hz", "re", "im"],
    "shifts": ["x", "dinvQ", "dff"],
    "gate": ["Vg_V", "fres_Hz", "Qi"],
    "residuals": ["x", "residual"],
}

# Esquemas cuya primera columna debe ser estrictamente monotona
ESQUEMAS_MONOTONOS = {"conductivity", "response", "tauqp", "tauqp_nqp", "sidebands", "s21", "trace", "gate"}

# Identificador del generador de numeros aleatorios que se anota en los metadatos
ID_GENERADOR = "numpy.PCG64"


@dataclass
class SweepTable:
    """
    Tabla de columnas numericas con un esquema declarado.

    columns guarda nombre -> arreglo numpy; metadata los comentarios "#".
    """

    schema: str
    columns: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        largos = {len(v) for v in self.columns.values()}
        if len(largos) > 1:
            raise TableError(f"tabla {self.schema}: columnas de distinto largo")
        self.columns = {k: np.asarray(v, dtype=float) for k, v in self.columns.items()}

    @property
    def names(self):
        return list(self.columns)

    def __len__(self):
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def __getitem__(self, nombre):
        try:
            return self.columns[nombre]
        except KeyError:
            raise TableError(f"tabla {self.schema}: falta la columna {nombre!r}") from None

    def validar(self, permitir_nan=()):
        """Primera columna estrictamente monotona y sin NaN salvo en permitir_nan."""
        for nombre, valores in self.columns.items():
            if nombre in permitir_nan:
                continue
            if not np.all(np.isfinite(valores)):
                raise TableError(f"tabla {self.schema}: la columna {nombre} tiene valores no finitos")
        if self.schema in ESQUEMAS_MONOTONOS and len(self) > 1:
            x = self.columns[self.names[0]]
            paso = np.diff(x)
            if not (np.all(paso > 0) or np.all(paso < 0)):
                raise TableError(f"tabla {self.schema}: la columna {self.names[0]} no es estrictamente monotona")
        return self


def nueva_tabla(schema, valores, metadata=None, extra=()):
    """Arma una SweepTable con los encabezados exactos del esquema (mas columnas extra)."""
    nombres = ESQUEMAS[schema] + list(extra)
    faltan = [n for n in nombres if n not in valores]
    if faltan:
        raise TableError(f"faltan columnas para el esquema {schema}: {faltan}")
    return SweepTable(schema, {n: valores[n] for n in nombres}, dict(metadata or {}))


def _formatear(valor):
    if math.isnan(valor):
        return "nan"
    if math.isinf(valor):
        return "inf" if valor > 0 else "-inf"
    return f"{valor:.17g}"


def escribir_tabla(tabla, destino):
    """Escribe la tabla en un objeto tipo archivo."""
    for clave, valor in tabla.metadata.items():
        destino.write(f"# {clave} = {valor}\n")
    escritor = csv.writer(destino, lineterminator="\n")
    escritor.writerow(tabla.names)
    columnas = [tabla.columns[n] for n in tabla.names]
    for fila in zip(*columnas):
        escritor.writerow([_formatear(float(v)) for v in fila])


def guardar_tabla(tabla, ruta):
    """Guarda la tabla en ruta; "-" o None la escribe a la salida estandar."""
    if ruta is None or str(ruta) == "-":
        escribir_tabla(tabla, sys.stdout)
        return
    ruta = Path(ruta)
    if ruta.parent and not ruta.parent.exists():
        ruta.parent.mkdir(parents=True, exist_ok=True)
    with open(ruta, "w", newline="", encoding="utf-8") as archivo:
        escribir_tabla(tabla, archivo)
    logger.info("[CSV] %s: %d filas guardadas en %s", tabla.schema, len(tabla), ruta)


def _leer_metadatos(lineas):
    metadatos = {}
    datos = []
    for linea in lineas:
        if linea.startswith("#"):
            contenido = linea[1:].strip()
            if "=" in contenido:
                clave, valor = contenido.split("=", 1)
                metadatos[clave.strip()] = valor.strip()
        elif linea.strip():
            datos.append(linea)
    return metadatos, datos


def leer_tabla(ruta, requeridas=(), schema=None):
    """
    Lee una tabla CSV con metadatos "#".

    requeridas son las columnas que deben estar; puede haber otras. Una celda
    que no es numero lanza TableError indicando la fila.

    Retorna:
        SweepTable
    """
    ruta = Path(ruta)
    if not ruta.exists():
        raise TableError(f"no se encontro el archivo {ruta}")
    with open(ruta, "r", encoding="utf-8") as archivo:
        metadatos, lineas = _leer_metadatos(archivo)

    lector = csv.DictReader(io.StringIO("".join(lineas)))
    if not lector.fieldnames:
        raise TableError(f"{ruta}: no hay encabezado")
    nombres = [n.strip() for n in lector.fieldnames]
    faltan = [n for n in requeridas if n not in nombres]
    if faltan:
        raise TableError(f"{ruta}: faltan las columnas {faltan} (encabezado: {','.join(nombres)})")

    columnas = {n: [] for n in nombres}
    for numero, fila in enumerate(lector, start=2):
        for original, nombre in zip(lector.fieldnames, nombres):
            celda = fila.get(original)
            try:
                columnas[nombre].append(float(celda))
            except (TypeError, ValueError):
                raise TableError(f"{ruta}, fila {numero}: valor no numerico en {nombre}: {celda!r}") from None

    tabla = SweepTable(schema or ruta.stem, columnas, metadatos)
    if len(tabla) == 0:
        raise TableError(f"{ruta}: la tabla no tiene filas")
    logger.debug("[CSV] %d filas leidas de %s", len(tabla), ruta)
    return tabla


def leer_tabla_gate(ruta):
    """Lee Vg_V,fres_Hz,Qi[,Ig_A] ordenada por V_g creciente. Retorna (vg, fres, qi)."""
    tabla = leer_tabla(ruta, requeridas=ESQUEMAS["gate"], schema="gate")
    orden = np.argsort(tabla["Vg_V"])
    return tabla["Vg_V"][orden], tabla["fres_Hz"][orden], tabla["Qi"][orden]


def metadatos_generador(seed, snr_db=None, **verdad):
    """Metadatos de una tabla sintetica: parametros verdaderos, semilla y generador."""
    metadatos = {f"truth.{k}": _formatear(float(v)) if isinstance(v, (int, float)) else v for k, v in verdad.items()}
    metadatos["seed"] = str(seed)
    metadatos["rng"] = ID_GENERADOR
    metadatos["snr_dB"] = "inf" if snr_db is None else _formatear(float(snr_db))
    return metadatos
