import math

import numpy as np
import pytest

from mbres.dynamics import (
    GateResponseModel,
    PulseSequence,
    TimeTrace,
    biastee_highpass,
    gate_relaxation,
    resonator_envelope,
    ring_time_constants,
    sideband_response,
    sideband_sweep,
    simulate_map,
)
from mbres.errores import (
    DomainError,
    NoCrossingError,
    PulseWindowWarning,
    SamplingError,
    SmallSignalWarning,
    StepSizeError,
)
from mbres.fitting import exp_fit, fit_gate_edges, fit_ring_up, lorentzian_fit, notch_s21
from mbres.resonator import ResonatorBaseline

from conftest import ALPHA, F_RES, QC, QI0

BASE = ResonatorBaseline(F_RES, QI0, QC, ALPHA)
QL = BASE.Q_L
ANCHO = F_RES / QL
SEMIANCHO = F_RES / (2 * QL)
DT = 1e-9
TAU_BIASTEE = 1 / (2 * math.pi * 40e3)


def _modelo(tau_R=100e-9, tau_F=100e-9):
    return GateResponseModel.linear(0.0, F_RES, QI0, -1e6, -20.0, tau_R=tau_R, tau_F=tau_F)


@pytest.fixture(scope="module")
def mapa():
    seq = PulseSequence.reference(gate_amplitude=0.5)
    f_ro = F_RES + np.linspace(-2.5, 2.5, 41) * ANCHO
    return seq, simulate_map(seq, f_ro, _modelo(), BASE, DT)


# =============================================================
# SECUENCIA
# =============================================================

def test_secuencia_de_referencia():
    seq = PulseSequence.reference()
    assert seq.trigger_period == 5e-6
    assert seq.readout_start == 0.6e-6 and seq.readout_duration == 4e-6
    assert seq.gate_start == 2e-6 and seq.gate_duration == 500e-9
    assert seq.tiene_gate
    t = seq.time_grid(DT)
    assert t.size == 5000
    assert seq.readout_window(t).sum() == 4000
    assert seq.gate_pulse(t).sum() == pytest.approx(1.5 * 500)


def test_la_lectura_debe_contener_el_gate():
    with pytest.raises(DomainError):
        PulseSequence(5e-6, 0.6e-6, 1e-6, gate_start=2e-6, gate_duration=500e-9, gate_amplitude=1.0)


def test_lectura_fuera_del_periodo():
    with pytest.raises(DomainError):
        PulseSequence(5e-6, 2e-6, 4e-6)


def test_gate_demasiado_corto_avisa():
    with pytest.warns(PulseWindowWarning):
        PulseSequence.reference(gate_duration=100e-9)


def test_sin_gate_con_amplitud_cero():
    seq = PulseSequence.reference().with_gate(0.0)
    assert not seq.tiene_gate
    assert not np.any(seq.gate_pulse(seq.time_grid(DT)))


def test_traza_con_grilla_no_uniforme():
    with pytest.raises(DomainError):
        TimeTrace(np.array([0.0, 1.0, 3.0]), np.zeros(3))


# =============================================================
# BIAS-TEE
# =============================================================

def test_escalon_decae_con_la_constante_del_polo():
    dt = 1e-8
    t = np.arange(6000) * dt
    y = biastee_highpass(np.ones_like(t), 40e3, dt)
    assert y[0] == 1.0
    assert np.interp(TAU_BIASTEE, t, y) == pytest.approx(math.exp(-1), rel=1e-4)
    assert abs(y[-1]) < 1e-5


def test_caida_durante_un_pulso_de_500_ns():
    t = np.arange(5000) * DT
    pulso = np.where((t >= 2e-6 - 1e-12) & (t < 2.5e-6 - 1e-12), 1.0, 0.0)
    y = biastee_highpass(pulso, 40e3, DT)
    fin = int(np.nonzero(pulso)[0][-1])
    assert 1 - y[fin] == pytest.approx(1 - math.exp(-500e-9 / TAU_BIASTEE), abs=2e-3)
    assert 1 - y[fin] == pytest.approx(0.118, abs=3e-3)
    assert y[fin + 10] < 0


def test_area_del_pulso_filtrado_tiende_a_cero():
    dt = 1e-8
    x = np.zeros(20000)
    x[100:150] = 1.0
    y = biastee_highpass(x, 40e3, dt)
    assert abs(np.sum(y)) < 1e-3 * np.sum(x)


def test_muestreo_demasiado_grueso():
    with pytest.raises(SamplingError):
        biastee_highpass(np.ones(10), 40e3, 3e-6)


# =============================================================
# RELAJACION DEL GATE
# =============================================================

def test_voltaje_constante_deja_la_tabla():
    fres, qi = gate_relaxation(np.zeros(200), _modelo(), DT)
    assert np.all(fres == F_RES)
    assert np.all(qi == QI0)


def test_escalon_llega_a_1_menos_e_a_la_constante():
    vg = np.where(np.arange(400) >= 100, 1.0, 0.0)
    fres, _ = gate_relaxation(vg, _modelo(), DT)
    fraccion = (fres[200] - F_RES) / (-1e6)
    assert fraccion == pytest.approx(1 - math.exp(-1), rel=1e-9)


def test_subida_y_bajada_con_constantes_distintas():
    n = np.arange(2500)
    vg = np.where((n >= 100) & (n < 1100), 1.0, 0.0)
    fres, _ = gate_relaxation(vg, _modelo(tau_R=50e-9, tau_F=150e-9), DT)
    subida = (fres[150] - F_RES) / (-1e6)
    assert subida == pytest.approx(1 - math.exp(-1), rel=1e-9)
    bajada = (fres[1250] - fres[1100]) / (F_RES - fres[1100])
    assert bajada == pytest.approx(1 - math.exp(-1), rel=1e-6)


def test_pulsos_simetricos_dan_respuestas_opuestas():
    n = np.arange(1000)
    pulso = np.where((n >= 100) & (n < 600), 0.5, 0.0)
    positivo, _ = gate_relaxation(pulso, _modelo(), DT)
    negativo, _ = gate_relaxation(-pulso, _modelo(), DT)
    np.testing.assert_allclose(positivo - F_RES, -(negativo - F_RES), atol=1e-3)


def test_no_se_extrapola_la_tabla():
    with pytest.raises(DomainError):
        gate_relaxation(np.full(10, 6.0), _modelo(), DT)


def test_tabla_no_monotona():
    with pytest.raises(DomainError):
        GateResponseModel(1e-7, 1e-7, np.array([0.0, 1.0, 2.0]), np.array([1.0, 2.0, 1.5]), np.array([3.0, 2.0, 1.0]))


# =============================================================
# ENVOLVENTE
# =============================================================

def _constante(n, valor):
    return np.full(n, float(valor))


def test_decaimiento_libre():
    n = 300
    traza = resonator_envelope(_constante(n, F_RES), _constante(n, QL), F_RES + 3e6, np.zeros(n), DT, QC, s0=1 + 0j)
    kappa = 2 * math.pi * F_RES / QL
    np.testing.assert_allclose(traza.magnitude, np.exp(-kappa * traza.t / 2), rtol=1e-5)
    assert np.all(np.diff(traza.magnitude) <= 0)


def test_ring_up_en_resonancia():
    n = 1000
    traza = resonator_envelope(_constante(n, F_RES), _constante(n, QL), F_RES, np.ones(n), DT, QC)
    assert traza.magnitude[-1] == pytest.approx(QL / QC, rel=1e-8)
    params, _ = exp_fit(traza.t, traza.magnitude, 0.0, 0.0)
    assert params.tau == pytest.approx(ring_time_constants(F_RES, QL)["amplitude_s"], rel=1e-4)


def test_estado_estacionario_es_el_modelo_notch():
    n = 2000
    f_ro = F_RES + 5e6
    traza = resonator_envelope(_constante(n, F_RES), _constante(n, QL), f_ro, np.ones(n), DT, QC)
    esperado = abs(notch_s21(f_ro, F_RES, QI0, QC))
    assert abs(1 - traza.s[-1]) == pytest.approx(esperado, rel=1e-8)


def test_paso_demasiado_grande():
    with pytest.raises(StepSizeError):
        resonator_envelope(_constante(100, F_RES), _constante(100, QL), F_RES, np.ones(100), 2e-9, QC)


def test_rk4_converge_al_reducir_el_paso():
    f_ro = F_RES + 3e6
    grueso = resonator_envelope(_constante(500, F_RES), _constante(500, QL), f_ro, np.ones(500), DT, QC)
    fino = resonator_envelope(_constante(999, F_RES), _constante(999, QL), f_ro, np.ones(999), DT / 2, QC)
    diferencia = np.max(np.abs(fino.s[::2] - grueso.s))
    assert diferencia / np.max(np.abs(grueso.s)) < 1e-6


def test_constantes_de_ring_up():
    tiempos = ring_time_constants(F_RES, QL)
    assert tiempos["amplitude_s"] == pytest.approx(2 * tiempos["quoted_s"])
    assert 19e-9 < tiempos["amplitude_s"] < 22e-9


# =============================================================
# MAPA TEMPORAL
# =============================================================

def test_corte_vertical_durante_el_gate_sigue_la_resonancia_programada(mapa):
    seq, m = mapa
    t = seq.gate_start + 450e-9
    f, s = m.vertical_cut(t)
    params, fit = lorentzian_fit(f, np.abs(s) ** 2)
    programada = m.programmed_fres(t)
    assert fit.converged
    assert abs(params.f_star - programada) < 0.1 * SEMIANCHO
    assert F_RES - params.f_star > 0.3e6
    q_programado = float(m.ql_t[int(np.argmin(np.abs(m.t - t)))])
    assert params.Q_L_hwhm == pytest.approx(q_programado, rel=0.05)


def test_ring_up_del_mapa(mapa):
    seq, m = mapa
    ring = fit_ring_up(m.horizontal_cut(F_RES), seq, F_RES, QL)
    assert ring.ratio == pytest.approx(1.0, abs=0.05)


def test_q_cargado_del_corte_y_del_ring_up_coinciden(mapa):
    seq, m = mapa
    f, s = m.vertical_cut(seq.gate_start - 100e-9)
    params, _ = lorentzian_fit(f, np.abs(s) ** 2)
    ring = fit_ring_up(m.horizontal_cut(F_RES), seq)
    q_ring = math.pi * F_RES * ring.tau
    assert params.Q_L_hwhm == pytest.approx(q_ring, rel=0.05)


def test_bias_tee_en_el_voltaje_del_mapa(mapa):
    _, m = mapa
    assert m.vg_t.max() == pytest.approx(0.5, rel=1e-3)
    assert m.vg_t.min() < -0.05


@pytest.mark.parametrize("tau_R,tau_F", [(100e-9, 100e-9), (80e-9, 150e-9)])
def test_flancos_del_gate_recuperan_las_constantes(tau_R, tau_F):
    seq = PulseSequence.reference(gate_amplitude=0.5)
    modelo = _modelo(tau_R, tau_F)
    positivo = simulate_map(seq, [F_RES], modelo, BASE, DT)
    negativo = simulate_map(seq.with_gate(-0.5), [F_RES], modelo, BASE, DT)
    flancos = fit_gate_edges(positivo.trace(0), negativo.trace(0), seq)
    assert flancos.tau_R == pytest.approx(tau_R, rel=0.10)
    assert flancos.tau_F == pytest.approx(tau_F, rel=0.10)


def test_sin_gate_los_cortes_no_cambian():
    seq = PulseSequence.reference().with_gate(0.0)
    f_ro = F_RES + np.linspace(-2, 2, 9) * ANCHO
    m = simulate_map(seq, f_ro, None, BASE, DT)
    _, temprano = m.vertical_cut(seq.readout_start + 1e-6)
    _, tardio = m.vertical_cut(seq.readout_start + 3e-6)
    np.testing.assert_allclose(temprano, tardio, atol=1e-12)


def test_ruido_reproducible_con_la_semilla():
    seq = PulseSequence.reference().with_gate(0.0)
    a = simulate_map(seq, [F_RES], None, BASE, DT, snr_db=30, seed=5)
    b = simulate_map(seq, [F_RES], None, BASE, DT, snr_db=30, seed=5)
    c = simulate_map(seq, [F_RES], None, BASE, DT, snr_db=30, seed=6)
    np.testing.assert_array_equal(a.s, b.s)
    assert not np.array_equal(a.s, c.s)


def test_hilos_dan_el_mismo_mapa():
    seq = PulseSequence.reference(gate_amplitude=0.5)
    f_ro = F_RES + np.linspace(-1, 1, 6) * ANCHO
    uno = simulate_map(seq, f_ro, _modelo(), BASE, DT, jobs=1)
    tres = simulate_map(seq, f_ro, _modelo(), BASE, DT, jobs=3)
    np.testing.assert_allclose(tres.s, uno.s, rtol=1e-12, atol=1e-14)


def test_lista_de_frecuencias_vacia():
    with pytest.raises(DomainError):
        simulate_map(PulseSequence.reference(), [], _modelo(), BASE, DT)


# =============================================================
# BANDAS LATERALES
# =============================================================

def test_bandas_en_f_r_mas_menos_f_g():
    espectro = sideband_response(1e6, 1e5, 50e-9, BASE)
    assert espectro.frequencies == [F_RES - 1e6, F_RES, F_RES + 1e6]
    assert espectro.amplitude[0] == espectro.amplitude[2]


def test_caida_de_un_polo():
    tau = 50e-9
    bajo = sideband_response(1.0, 1e5, tau, BASE).amplitude[2]
    alto = sideband_response(10 / (2 * math.pi * tau), 1e5, tau, BASE).amplitude[2]
    assert alto / bajo == pytest.approx(1 / math.sqrt(101), rel=1e-6)


def test_punto_de_menos_3_db_con_50_ns():
    f_g = np.logspace(5, math.log10(2.5e7), 60)
    barrido = sideband_sweep(f_g, 1e5, 50e-9, BASE)
    assert 3.0e6 <= barrido.f_3db <= 3.4e6
    assert np.all(np.diff(barrido.amp_rel_db) < 0)


def test_doble_tau_mitad_de_frecuencia():
    f_g = np.logspace(4, math.log10(2.5e7), 120)
    uno = sideband_sweep(f_g, 1e5, 50e-9, BASE).f_3db
    doble = sideband_sweep(f_g, 1e5, 100e-9, BASE).f_3db
    assert doble == pytest.approx(uno / 2, rel=0.02)


def test_filtrado_del_resonador_baja_el_corte():
    f_g = np.logspace(5, math.log10(2.5e7), 60)
    simple = sideband_sweep(f_g, 1e5, 50e-9, BASE).f_3db
    filtrado = sideband_sweep(f_g, 1e5, 50e-9, BASE, resonator_filtering=True).f_3db
    assert filtrado < simple


def test_modulacion_profunda_avisa():
    with pytest.warns(SmallSignalWarning):
        sideband_response(1e6, 5e6, 50e-9, BASE)


def test_sin_cruce_en_el_rango():
    with pytest.raises(NoCrossingError):
        sideband_sweep(np.logspace(3, 5, 20), 1e5, 50e-9, BASE)


def test_barrido_que_empieza_cerca_del_corte_no_corre_el_menos_3_db():
    # Primer punto a 1 MHz, donde la caida ya es de ~0.4 dB
    tau = 50e-9
    f_g = np.logspace(6, math.log10(3e7), 60)
    barrido = sideband_sweep(f_g, 1e3, tau, BASE)
    esperado = math.sqrt(10 ** 0.3 - 1) / (2 * math.pi * tau)
    assert barrido.f_3db == pytest.approx(esperado, rel=0.01)


def test_barrido_que_empieza_despues_del_corte_no_tiene_cruce():
    with pytest.raises(NoCrossingError):
        sideband_sweep(np.logspace(7, 8, 20), 1e3, 50e-9, BASE)


def test_barrido_sin_modulacion_es_invalido():
    with pytest.raises(DomainError):
        sideband_sweep(np.logspace(5, 7, 20), 0.0, 50e-9, BASE)
