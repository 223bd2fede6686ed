import sys

from qcoh.cli import main

sys.exit(main())
