import pytest

from mbres.config import RunConfig, UnitsDeclaration, cargar_config, construir_config
from mbres.errores import ConfigError


def _escribir(tmp_path, texto, nombre="corrida.toml"):
    ruta = tmp_path / nombre
    ruta.write_text(texto, encoding="utf-8")
    return ruta


def test_valores_por_defecto():
    config = cargar_config()
    assert isinstance(config, RunConfig)
    assert config.material.T_c == 1.34
    assert config.material.N0 is None
    assert config.baseline.f_res0 == 6.84e9
    assert config.baseline.Q_L == pytest.approx(1 / (1 / 980 + 1 / 828))
    assert config.T_ref == pytest.approx(0.010)
    assert config.seed == 0
    assert config.sequence.gate_start == pytest.approx(2e-6)
    assert config.gate.tau_R == pytest.approx(100e-9)


def test_archivo_toml_con_tablas_anidadas(tmp_path):
    ruta = _escribir(tmp_path, """
seed = 7
T_ref_K = 0.02

[material]
Tc_K = 1.2
N0 = 1.7e47

[baseline]
Qi0 = 1500
alpha = 0.3
""")
    config = cargar_config(ruta)
    assert config.seed == 7
    assert config.T_ref == pytest.approx(0.02)
    assert config.material.T_c == pytest.approx(1.2)
    assert config.material.N0 == pytest.approx(1.7e47)
    assert config.baseline.Q_i0 == pytest.approx(1500)
    assert config.baseline.alpha == pytest.approx(0.3)
    assert config.baseline.Q_c == pytest.approx(828)


def test_clave_desconocida(tmp_path):
    ruta = _escribir(tmp_path, "[material]\nTc = 1.2\n")
    with pytest.raises(ConfigError, match="material.Tc"):
        cargar_config(ruta)


def test_archivo_inexistente(tmp_path):
    with pytest.raises(ConfigError):
        cargar_config(tmp_path / "no_existe.toml")


def test_toml_invalido(tmp_path):
    with pytest.raises(ConfigError):
        cargar_config(_escribir(tmp_path, "material.Tc_K = = 1\n"))


@pytest.mark.parametrize("claves", [
    {"material.Tc_K": -1.0},
    {"baseline.Qc": 0},
    {"baseline.alpha": "alto"},
    {"T_ref_K": 1.5},
    {"seed": -3},
    {"seed": 1.5},
])
def test_valores_invalidos(claves):
    with pytest.raises(ConfigError):
        construir_config(claves)


def test_secuencia_invalida_es_error_de_configuracion():
    with pytest.raises(ConfigError):
        construir_config({"sequence.readout_duration_s": 6e-6})


def test_unidades():
    unidades = UnitsDeclaration.parse("GHz,mK,ns")
    assert unidades.freq == "GHz"
    assert unidades.temp == "mK"
    assert unidades.time == "ns"
    assert unidades.voltage == "V"
    assert unidades.to_si("freq", 6.84) == pytest.approx(6.84e9)
    assert unidades.to_si("temp", 510) == pytest.approx(0.51)
    assert unidades.to_si("time", 50) == pytest.approx(50e-9)


def test_unidades_parciales_conservan_la_base():
    base = UnitsDeclaration(freq="GHz")
    unidades = UnitsDeclaration.parse("mK", base=base)
    assert unidades.freq == "GHz"
    assert unidades.temp == "mK"


def test_unidad_desconocida():
    with pytest.raises(ConfigError):
        UnitsDeclaration.parse("MHz")
    with pytest.raises(ConfigError):
        construir_config({"units.temp": "C"})


def test_override_de_unidades():
    config = construir_config({"units.freq": "GHz"}, units_override="ns")
    assert config.units.freq == "GHz"
    assert config.units.time == "ns"


def test_tabla_de_gate_relativa_al_archivo(tmp_path):
    (tmp_path / "gate.csv").write_text(
        "Vg_V,fres_Hz,Qi\n-1,6.841e9,1000\n0,6.84e9,980\n1,6.839e9,960\n", encoding="utf-8"
    )
    ruta = _escribir(tmp_path, '[gate]\ntable = "gate.csv"\ntau_R_s = 5e-8\n')
    config = cargar_config(ruta)
    assert config.gate.table == tmp_path / "gate.csv"
    modelo = config.gate_model()
    assert modelo.tau_R == pytest.approx(5e-8)
    assert modelo.tau_F == pytest.approx(100e-9)


def test_modelo_de_gate_lineal():
    config = construir_config({"sequence.gate_offset_V": 0.2})
    modelo = config.gate_model()
    assert modelo.tau_R == pytest.approx(100e-9)
    assert modelo.tau_F == pytest.approx(100e-9)
