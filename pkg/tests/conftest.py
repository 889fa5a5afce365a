import pytest

from mbres.mattis_bardeen import MaterialParams
from mbres.resonator import ResonatorBaseline

# Dispositivo de referencia: aluminio con T_c = 1.34 K, resonador de 6.84 GHz
TC = 1.34
F_RES = 6.84e9
QI0 = 980.0
QC = 828.0
ALPHA = 0.17


@pytest.fixture
def material():
    return MaterialParams(T_c=TC, tau0=30e-9)


@pytest.fixture
def material_n0():
    return MaterialParams(T_c=TC, tau0=30e-9, N0=1.7e47)


@pytest.fixture
def baseline():
    return ResonatorBaseline(f_res0=F_RES, Q_i0=QI0, Q_c=QC, alpha=ALPHA)
