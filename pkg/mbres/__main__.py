import sys

from mbres.cli import main

sys.exit(main())
