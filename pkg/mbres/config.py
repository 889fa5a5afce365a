"""
Configuracion de una corrida: material, resonador, unidades, semilla,
secuencia pulsada y respuesta al gate.

El archivo es TOML con claves planas separadas por puntos:

    material.Tc_K = 1.34
    baseline.Qi0 = 980
    units.freq = "GHz"

Todas las claves son opcionales; las que faltan toman los valores del
dispositivo de referencia (CLAVES mas abajo).
"""

import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from mbres.dynamics import FC_BIASTEE, GateResponseModel, PulseSequence
from mbres.errores import ConfigError, MbresError
from mbres.mattis_bardeen import MaterialParams
from mbres.resonator import T_REF_DEFECTO, ResonatorBaseline

logger = logging.getLogger(__name__)

# --- CONFIGURACION ---

# Claves reconocidas y su valor por defecto (None = sin valor)
CLAVES = {
    "material.Tc_K": 1.34,
    "material.tau0_s": 30e-9,
    "material.N0": None,
    "baseline.fres0_Hz": 6.84e9,
    "baseline.Qi0": 980.0,
    "baseline.Qc": 828.0,
    "baseline.alpha": 0.17,
    "T_ref_K": T_REF_DEFECTO,
    "seed": 0,
    "units.freq": "Hz",
    "units.temp": "K",
    "units.time": "s",
    "units.voltage": "V",
    "sequence.trigger_period_s": 5e-6,
    "sequence.readout_start_s": 0.6e-6,
    "sequence.readout_duration_s": 4e-6,
    "sequence.gate_start_s": 2e-6,
    "sequence.gate_duration_s": 500e-9,
    "sequence.gate_amplitude_V": 1.5,
    "sequence.gate_offset_V": 0.0,
    "gate.tau_R_s": 100e-9,
    "gate.tau_F_s": 100e-9,
    "gate.table": None,
    "gate.dfres_dV_Hz_per_V": -1.0e6,
    "gate.dQi_dV_per_V": -20.0,
    "gate.biastee_fc_Hz": FC_BIASTEE,
}

# Factores a SI de las unidades admitidas
UNIDADES = {
    "freq": {"Hz": 1.0, "GHz": 1e9},
    "temp": {"K": 1.0, "mK": 1e-3},
    "time": {"s": 1.0, "ns": 1e-9},
    "voltage": {"V": 1.0},
}


@dataclass(frozen=True)
class UnitsDeclaration:
    """Unidades de los valores numericos que entran por la linea de comandos."""

    freq: str = "Hz"
    temp: str = "K"
    time: str = "s"
    voltage: str = "V"

    def __post_init__(self):
        for magnitud in UNIDADES:
            unidad = getattr(self, magnitud)
            if unidad not in UNIDADES[magnitud]:
                raise ConfigError(
                    f"unidad {unidad!r} no admitida para {magnitud}; "
                    f"use una de {sorted(UNIDADES[magnitud])}"
                )

    @classmethod
    def parse(cls, texto, base=None):
        """
        Lee una lista separada por comas como "GHz,mK,ns".

        Cada unidad se asigna a su magnitud; las que no aparecen se toman de base.
        """
        valores = {} if base is None else {m: getattr(base, m) for m in UNIDADES}
        for token in (t.strip() for t in texto.split(",")):
            if not token:
                continue
            magnitudes = [m for m, tabla in UNIDADES.items() if token in tabla]
            if not magnitudes:
                raise ConfigError(f"unidad desconocida: {token!r}")
            valores[magnitudes[0]] = token
        return cls(**valores)

    def factor(self, magnitud):
        return UNIDADES[magnitud][getattr(self, magnitud)]

    def to_si(self, magnitud, valor):
        return valor * self.factor(magnitud)


@dataclass(frozen=True)
class GateSettings:
    """Respuesta al gate: tiempos de relajacion, tablas y corte del bias-tee."""

    tau_R: float = 100e-9
    tau_F: float = 100e-9
    table: Optional[Path] = None
    dfres_dV: float = -1.0e6
    dQi_dV: float = -20.0
    biastee_fc: float = FC_BIASTEE


@dataclass(frozen=True)
class RunConfig:
    material: MaterialParams
    baseline: ResonatorBaseline
    T_ref: float = T_REF_DEFECTO
    units: UnitsDeclaration = field(default_factory=UnitsDeclaration)
    seed: int = 0
    sequence: Optional[PulseSequence] = None
    gate: GateSettings = field(default_factory=GateSettings)

    def gate_model(self):
        """Modelo de respuesta al gate: tabla medida si hay, si no tablas lineales."""
        offset = self.sequence.gate_offset if self.sequence is not None else 0.0
        if self.gate.table is not None:
            from mbres.tablas import leer_tabla_gate

            vg, fres, qi = leer_tabla_gate(self.gate.table)
            return GateResponseModel(self.gate.tau_R, self.gate.tau_F, vg, fres, qi)
        return GateResponseModel.linear(
            offset, self.baseline.f_res0, self.baseline.Q_i0,
            self.gate.dfres_dV, self.gate.dQi_dV,
            tau_R=self.gate.tau_R, tau_F=self.gate.tau_F,
        )


def _aplanar(datos, prefijo=""):
    """{"material": {"Tc_K": 1}} -> {"material.Tc_K": 1}"""
    plano = {}
    for clave, valor in datos.items():
        nombre = f"{prefijo}{clave}"
        if isinstance(valor, dict):
            plano.update(_aplanar(valor, nombre + "."))
        else:
            plano[nombre] = valor
    return plano


def _numero(valores, clave):
    valor = valores[clave]
    if isinstance(valor, bool) or not isinstance(valor, (int, float)):
        raise ConfigError(f"{clave} debe ser numerico, se recibio {valor!r}")
    return float(valor)


def _positivo(valores, clave):
    valor = _numero(valores, clave)
    if not valor > 0:
        raise ConfigError(f"{clave} debe ser > 0, se recibio {valor!r}")
    return valor


def leer_archivo(ruta):
    """Lee el TOML y retorna el diccionario plano de claves."""
    ruta = Path(ruta)
    try:
        with open(ruta, "rb") as archivo:
            datos = tomllib.load(archivo)
    except FileNotFoundError as e:
        raise ConfigError(f"no se encontro el archivo de configuracion {ruta}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{ruta}: TOML invalido: {e}") from e
    return _aplanar(datos)


def construir_config(claves=None, units_override=None, base_dir=None):
    """
    Arma un RunConfig desde un diccionario de claves planas.

    Las claves desconocidas y los valores fisicos no positivos lanzan
    ConfigError. units_override es el texto de --units.
    """
    claves = claves or {}
    desconocidas = sorted(set(claves) - set(CLAVES))
    if desconocidas:
        raise ConfigError(f"claves de configuracion desconocidas: {', '.join(desconocidas)}")
    valores = {**CLAVES, **claves}

    try:
        n0 = valores["material.N0"]
        material = MaterialParams(
            T_c=_positivo(valores, "material.Tc_K"),
            tau0=_positivo(valores, "material.tau0_s"),
            N0=None if n0 is None else _positivo(valores, "material.N0"),
        )
        baseline = ResonatorBaseline(
            f_res0=_positivo(valores, "baseline.fres0_Hz"),
            Q_i0=_positivo(valores, "baseline.Qi0"),
            Q_c=_positivo(valores, "baseline.Qc"),
            alpha=_positivo(valores, "baseline.alpha"),
        )
        units = UnitsDeclaration(
            freq=str(valores["units.freq"]),
            temp=str(valores["units.temp"]),
            time=str(valores["units.time"]),
            voltage=str(valores["units.voltage"]),
        )
        if units_override:
            units = UnitsDeclaration.parse(units_override, base=units)
        sequence = PulseSequence(
            trigger_period=_positivo(valores, "sequence.trigger_period_s"),
            readout_start=_numero(valores, "sequence.readout_start_s"),
            readout_duration=_positivo(valores, "sequence.readout_duration_s"),
            gate_start=_numero(valores, "sequence.gate_start_s"),
            gate_duration=_numero(valores, "sequence.gate_duration_s"),
            gate_amplitude=_numero(valores, "sequence.gate_amplitude_V"),
            gate_offset=_numero(valores, "sequence.gate_offset_V"),
        )
        tabla = valores["gate.table"]
        if tabla is not None:
            tabla = Path(tabla)
            if base_dir is not None and not tabla.is_absolute():
                tabla = Path(base_dir) / tabla
        gate = GateSettings(
            tau_R=_positivo(valores, "gate.tau_R_s"),
            tau_F=_positivo(valores, "gate.tau_F_s"),
            table=tabla,
            dfres_dV=_numero(valores, "gate.dfres_dV_Hz_per_V"),
            dQi_dV=_numero(valores, "gate.dQi_dV_per_V"),
            biastee_fc=_positivo(valores, "gate.biastee_fc_Hz"),
        )
        t_ref = _positivo(valores, "T_ref_K")
    except ConfigError:
        raise
    except MbresError as e:
        raise ConfigError(str(e)) from e

    seed = valores["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or not (0 <= seed < 2 ** 64):
        raise ConfigError(f"seed debe ser un entero de 64 bits no negativo, se recibio {seed!r}")
    if t_ref >= material.T_c:
        raise ConfigError(f"T_ref_K = {t_ref} debe ser menor que material.Tc_K = {material.T_c}")

    return RunConfig(
        material=material,
        baseline=baseline,
        T_ref=t_ref,
        units=units,
        seed=seed,
        sequence=sequence,
        gate=gate,
    )


def cargar_config(ruta=None, units_override=None):
    """Config desde archivo (o solo valores por defecto si ruta es None)."""
    if ruta is None:
        return construir_config({}, units_override)
    claves = leer_archivo(ruta)
    logger.debug("[Config] %d claves leidas de %s", len(claves), ruta)
    return construir_config(claves, units_override, base_dir=Path(ruta).parent)
