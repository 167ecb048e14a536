import sys

from cweno_uq.cli import main

sys.exit(main())
