import math

import numpy as np
import pytest

from mbres.errores import (
    CircleDegeneracyError,
    DegenerateDataError,
    DomainError,
    FitError,
    FitRangeWarning,
    InsufficientSpanError,
    SingularJacobianError,
)
from mbres.fitting import circle_fit, exp_fit, lorentzian_fit, mb_fit, nlls, notch_s21
from mbres.mattis_bardeen import MaterialParams
from mbres.resonator import ResonatorBaseline, freq_shift, loss_shift

from conftest import ALPHA, F_RES, QC, QI0, TC

F_CIRCULO = 6.837e9
QL_CIRCULO = 1 / (1 / QI0 + 1 / QC)


def _traza_notch(puntos=2001, anchos=6.0, **opciones):
    f = F_CIRCULO + np.linspace(-anchos, anchos, puntos) * F_CIRCULO / QL_CIRCULO
    return f, notch_s21(f, F_CIRCULO, QI0, QC, **opciones)


def _respuesta(T, t_ref=0.010):
    baseline = ResonatorBaseline(F_RES, QI0, QC, ALPHA)
    material = MaterialParams(T_c=TC)
    return freq_shift(T, baseline, material, t_ref), loss_shift(T, baseline, material, t_ref)


# =============================================================
# MOTOR
# =============================================================

def _recta(x, p):
    return p[0] * x + p[1]


def test_modelo_lineal_exacto():
    x = np.linspace(0, 10, 20)
    r = nlls(_recta, x, 3.0 * x - 2.0, [0.0, 0.0], names=["a", "b"])
    assert r.converged
    assert r.params["a"] == pytest.approx(3.0, rel=1e-10)
    assert r.params["b"] == pytest.approx(-2.0, rel=1e-10)
    assert r.residual_norm < 1e-9


def test_inicio_en_el_optimo():
    x = np.linspace(0, 10, 20)
    r = nlls(_recta, x, 3.0 * x - 2.0, [3.0, -2.0])
    assert r.converged
    assert r.residual_norm < 1e-12
    assert r.params["p0"] == pytest.approx(3.0, rel=1e-12)


def test_residuos_ortogonales_al_jacobiano():
    rng = np.random.default_rng(3)
    x = np.linspace(0, 10, 50)
    y = 3.0 * x - 2.0 + rng.normal(0, 0.5, x.size)
    r = nlls(_recta, x, y, [1.0, 0.0])
    proyeccion = r.jacobian.T @ r.residuals
    escala = np.linalg.norm(r.jacobian, axis=0) * np.linalg.norm(r.residuals)
    assert np.all(np.abs(proyeccion) / escala < 1e-6)


def test_jacobiano_coincide_con_diferencias_centrales():
    rng = np.random.default_rng(4)
    x = np.linspace(0, 5, 60)

    def modelo(x, p):
        return p[0] * np.exp(-p[1] * x)

    y = modelo(x, [2.0, 0.7]) + rng.normal(0, 0.01, x.size)
    r = nlls(modelo, x, y, [1.5, 1.0])
    p = np.array(list(r.params.values()))
    numerico = np.empty_like(r.jacobian)
    for j in range(p.size):
        h = 1e-6 * abs(p[j])
        arriba, abajo = p.copy(), p.copy()
        arriba[j] += h
        abajo[j] -= h
        numerico[:, j] = (modelo(x, arriba) - modelo(x, abajo)) / (2 * h)
    np.testing.assert_allclose(r.jacobian, numerico, rtol=1e-6, atol=1e-9)


def test_jacobiano_singular():
    x = np.linspace(0, 1, 10)
    with pytest.raises(SingularJacobianError):
        nlls(lambda x, p: (p[0] + p[1]) * x, x, 2 * x, [1.0, 1.0])


def test_inicio_fuera_de_los_limites():
    x = np.linspace(0, 1, 10)
    with pytest.raises(DomainError):
        nlls(_recta, x, x, [5.0, 0.0], bounds=([0, -1], [1, 1]))


def test_registro_plano():
    x = np.linspace(0, 10, 20)
    r = nlls(_recta, x, 3.0 * x - 2.0, [0.0, 0.0], names=["a", "b"])
    registro = r.as_record()
    assert registro[0].startswith("a=")
    assert registro[1].startswith("a_stderr=")
    assert "converged=true" in registro


# =============================================================
# LORENTZIANA
# =============================================================

def _lorentz(f, f0, g, b, c):
    return b * g * g / ((f - f0) ** 2 + g * g) + c


def test_lorentziana_exacta():
    f = F_RES + np.linspace(-5, 5, 201) * 7.6e6
    params, fit = lorentzian_fit(f, _lorentz(f, F_RES, 7.6e6, -0.8, 1.0))
    assert fit.converged
    assert params.f_star == pytest.approx(F_RES, rel=1e-8)
    assert params.gamma == pytest.approx(7.6e6, rel=1e-8)
    assert params.beta == pytest.approx(-0.8, rel=1e-8)
    assert params.theta == pytest.approx(1.0, rel=1e-8)


def test_lorentziana_cobertura_con_ruido():
    f = F_RES + np.linspace(-5, 5, 200) * 7.6e6
    limpia = _lorentz(f, F_RES, 7.6e6, 0.8, 0.1)
    dentro = 0
    for semilla in range(100):
        rng = np.random.default_rng(semilla)
        params, fit = lorentzian_fit(f, limpia + rng.normal(0, 0.01 * 0.9, f.size))
        if abs(params.f_star - F_RES) <= 3 * fit.stderr["f_star_Hz"]:
            dentro += 1
    assert dentro >= 95


def test_q_cargado_desde_el_modulo_al_cuadrado():
    f = F_RES + np.linspace(-5, 5, 301) * F_RES / (2 * QL_CIRCULO)
    params, _ = lorentzian_fit(f, np.abs(notch_s21(f, F_RES, QI0, QC)) ** 2)
    assert params.Q_L_hwhm == pytest.approx(QL_CIRCULO, rel=1e-7)
    assert params.Q_L_fwhm == pytest.approx(2 * QL_CIRCULO, rel=1e-7)


def test_lorentziana_plana():
    with pytest.raises(DegenerateDataError):
        lorentzian_fit(np.linspace(0, 1, 20), np.ones(20))


def test_lorentziana_con_pocos_puntos():
    with pytest.raises(DomainError):
        lorentzian_fit(np.linspace(0, 1, 5), np.linspace(0, 1, 5))


# =============================================================
# EXPONENCIAL
# =============================================================

def test_exponencial_exacta():
    t = np.linspace(1e-6, 1.6e-6, 300)
    y = 0.2 + (1.0 - 0.2) * np.exp(-(t - 1e-6) / 100e-9)
    params, fit = exp_fit(t, y, 1e-6, 1.0)
    assert params.tau == pytest.approx(100e-9, rel=1e-6)
    assert params.B == pytest.approx(0.2, rel=1e-6)
    assert fit.params["tau_s"] == params.tau


def test_exponencial_constante():
    with pytest.raises(DegenerateDataError):
        exp_fit(np.linspace(0, 1, 10), np.ones(10), 0.0, 1.0)


def test_exponencial_con_muestras_antes_de_t0():
    with pytest.raises(DomainError):
        exp_fit(np.linspace(0, 1, 10), np.linspace(1, 0, 10), 0.5, 1.0)


# =============================================================
# CIRCLE FIT
# =============================================================

def _verificar_circulo(c, rel):
    assert c.f_res == pytest.approx(F_CIRCULO, rel=rel)
    assert c.Q_L == pytest.approx(QL_CIRCULO, rel=rel)
    assert c.Q_i == pytest.approx(QI0, rel=rel)
    assert c.Q_c == pytest.approx(QC, rel=rel)


def test_circulo_sin_ruido():
    f, z = _traza_notch()
    circulo, fit = circle_fit(f, z)
    _verificar_circulo(circulo, 1e-6)
    assert fit.converged


def test_circulo_con_retardo_desadaptacion_y_ganancia():
    f, z = _traza_notch(a=0.6, alpha=1.1, delay=50e-9, phi=0.2)
    circulo, _ = circle_fit(f, z)
    _verificar_circulo(circulo, 1e-6)
    assert circulo.delay == pytest.approx(50e-9, rel=1e-6)
    assert circulo.phi == pytest.approx(0.2, abs=1e-6)
    assert circulo.a == pytest.approx(0.6, rel=1e-6)


def test_circulo_invariante_ante_rotacion_y_escala():
    f, z = _traza_notch(delay=20e-9)
    base, _ = circle_fit(f, z)
    rotado, _ = circle_fit(f, z * 0.3 * np.exp(2.5j))
    for nombre in ("f_res", "Q_L", "Q_c", "Q_i"):
        assert getattr(rotado, nombre) == pytest.approx(getattr(base, nombre), rel=1e-7)


def test_circulo_con_40_db_de_snr():
    f, z = _traza_notch()
    sigma = 10 ** (-40 / 20) / math.sqrt(2)
    for semilla in range(50):
        rng = np.random.default_rng(semilla)
        ruidosa = z + sigma * (rng.standard_normal(f.size) + 1j * rng.standard_normal(f.size))
        circulo, _ = circle_fit(f, ruidosa)
        assert circulo.Q_i == pytest.approx(QI0, rel=0.01)
        assert circulo.Q_c == pytest.approx(QC, rel=0.01)
        assert circulo.Q_L == pytest.approx(QL_CIRCULO, rel=0.01)
        assert circulo.f_res == pytest.approx(F_CIRCULO, rel=1e-5)


def test_circulo_con_pocos_puntos():
    f, z = _traza_notch(puntos=20)
    with pytest.raises(InsufficientSpanError):
        circle_fit(f, z)


def test_circulo_con_span_angosto():
    f, z = _traza_notch(puntos=200, anchos=0.5)
    with pytest.raises(FitError):
        circle_fit(f, z)


def test_puntos_colineales():
    f = np.linspace(6.8e9, 6.9e9, 100)
    with pytest.raises(CircleDegeneracyError):
        circle_fit(f, 1.0 + 0.1 * np.linspace(-1, 1, 100) + 0j)


def test_registro_del_circulo():
    f, z = _traza_notch()
    circulo, _ = circle_fit(f, z)
    registro = circulo.as_record()
    assert registro[0].startswith("fres_Hz=6837")
    assert any(linea.startswith("Qi=") for linea in registro)


# =============================================================
# ALPHA Y T_C
# =============================================================

T_GRILLA = np.linspace(0.1, 0.9, 20)


@pytest.mark.parametrize("modo", ["joint", "dff", "dinvq", "averaged"])
def test_mattis_bardeen_sin_ruido(modo):
    dff, dinvq = _respuesta(T_GRILLA)
    r = mb_fit(T_GRILLA, dff, dinvq, f_res=F_RES, mode=modo, t_ref=0.010)
    assert r.params["alpha"] == pytest.approx(ALPHA, rel=1e-5)
    assert r.params["Tc_K"] == pytest.approx(TC, rel=1e-5)


def test_mattis_bardeen_con_5_por_ciento_de_ruido():
    dff, dinvq = _respuesta(T_GRILLA)
    aciertos = 0
    for semilla in range(100):
        rng = np.random.default_rng(semilla)
        ruido_f = dff * (1 + 0.05 * rng.standard_normal(T_GRILLA.size))
        ruido_q = dinvq * (1 + 0.05 * rng.standard_normal(T_GRILLA.size))
        r = mb_fit(T_GRILLA, ruido_f, ruido_q, f_res=F_RES, t_ref=0.010, weighting="relative")
        if abs(r.params["alpha"] - ALPHA) <= 0.01 and abs(r.params["Tc_K"] - TC) <= 0.05:
            aciertos += 1
    assert aciertos >= 90


def test_canales_separados_coinciden():
    dff, dinvq = _respuesta(T_GRILLA)
    solo_f = mb_fit(T_GRILLA, dff, dinvq, f_res=F_RES, mode="dff", t_ref=0.010)
    solo_q = mb_fit(T_GRILLA, dff, dinvq, f_res=F_RES, mode="dinvq", t_ref=0.010)
    assert solo_f.params["alpha"] == pytest.approx(solo_q.params["alpha"], rel=1e-5)
    assert solo_f.params["Tc_K"] == pytest.approx(solo_q.params["Tc_K"], rel=1e-5)


def test_rango_de_temperatura_corto_avisa():
    T = np.linspace(0.1, 0.45, 12)
    dff, dinvq = _respuesta(T)
    with pytest.warns(FitRangeWarning):
        mb_fit(T, dff, dinvq, f_res=F_RES, t_ref=0.010)


def test_modo_desconocido():
    dff, dinvq = _respuesta(T_GRILLA)
    with pytest.raises(DomainError):
        mb_fit(T_GRILLA, dff, dinvq, mode="promedio")


def test_temperaturas_desordenadas():
    dff, dinvq = _respuesta(T_GRILLA)
    with pytest.raises(DomainError):
        mb_fit(T_GRILLA[::-1], dff, dinvq)
