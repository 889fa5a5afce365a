"""
Script principal de mbres.

Uso:
    python main.py response --T 0.05:1.0:20 --out data/respuesta.csv
    python main.py fit mb data/respuesta.csv --weighting relative

Es lo mismo que "python -m mbres"; ver mbres/cli.py para los comandos.
"""

import sys

from mbres.cli import main

if __name__ == "__main__":
    sys.exit(main())
