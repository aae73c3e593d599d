import sys

from ris_ssk.cli import main

sys.exit(main())
