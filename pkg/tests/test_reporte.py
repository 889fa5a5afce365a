import io
from datetime import datetime

from mbres.reporte import (
    ANCHO,
    encabezado,
    generar_avisos_filas,
    mostrar_reporte,
    seccion,
    subseccion,
)


def test_seccion_con_ancho_y_marca_propios():
    lineas = seccion("AJUSTE", ancho=20, marca="#").splitlines()
    assert lineas == ["", "#" * 20, "  AJUSTE", "#" * 20]


def test_titulo_largo_ensancha_el_marco():
    titulo = "T" * (ANCHO + 10)
    lineas = seccion(titulo).splitlines()
    assert len(lineas[1]) == len(titulo) + 4
    assert lineas[1] == lineas[3]


def test_subseccion_subraya_el_titulo():
    assert subseccion("Filas", marca="~").splitlines() == ["", "  Filas", "  ~~~~~"]


def test_encabezado_con_fecha_fija():
    texto = encabezado("sidebands", "1.0", ahora=datetime(2024, 3, 1, 12, 30, 5))
    assert "  MBRES 1.0 - comando: sidebands" in texto
    assert "  Generado el: 2024-03-01 12:30:05" in texto


def test_reporte_va_al_flujo_indicado(tmp_path):
    destino = io.StringIO()
    ruta = tmp_path / "reportes" / "corrida.txt"
    reporte = mostrar_reporte(["uno", "dos"], ruta=ruta, flujo=destino)
    assert reporte == "uno\ndos"
    assert destino.getvalue() == "uno\ndos\n"
    assert ruta.read_text(encoding="utf-8") == "uno\ndos\n"


def test_reporte_silencioso_igual_se_guarda(tmp_path):
    destino = io.StringIO()
    ruta = tmp_path / "corrida.txt"
    mostrar_reporte([seccion("X")], ruta=ruta, silencioso=True, flujo=destino)
    assert destino.getvalue() == ""
    assert "  X" in ruta.read_text(encoding="utf-8")


def test_reporte_por_defecto_al_error_estandar(capsys):
    mostrar_reporte(["resumen"])
    capturado = capsys.readouterr()
    assert capturado.out == ""
    assert capturado.err == "resumen\n"


def test_avisos_solo_listan_filas_marcadas():
    texto = generar_avisos_filas(["", "perdida fuera de rango", None])
    assert "Filas marcadas: 1 de 3" in texto
    assert "fila 1: perdida fuera de rango" in texto
    assert "fila 0" not in texto
