"""
mbres: respuesta de Mattis-Bardeen, dinamica temporal y ajustes de resonadores superconductores.
"""

__version__ = "0.1.0"

from mbres.dynamics import (
    GateResponseModel,
    PulseSequence,
    SidebandSpectrum,
    SidebandSweep,
    TimeMap,
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
    ConfigError,
    DomainError,
    FitError,
    MbresError,
    TableError,
)
from mbres.fitting import (
    CircleFitResult,
    FitResult,
    circle_fit,
    exp_fit,
    fit_gate_edges,
    fit_ring_up,
    lorentzian_fit,
    mb_fit,
    nlls,
    notch_s21,
)
from mbres.mattis_bardeen import (
    ConductivityRatio,
    MaterialParams,
    QuasiparticleDensity,
    gap0,
    nqp_thermal,
    sigma_ratio,
)
from mbres.resonator import (
    ResonatorBaseline,
    ResonatorState,
    effective_temperature,
    freq_shift,
    invert_loss_series,
    loss_shift,
    predict_freq_from_loss,
    qp_recombination_time_generic,
    qp_recombination_time_thermal,
    resonator_state,
    shifts_from_gate_sweep,
    tau_qp_at_teff,
)
