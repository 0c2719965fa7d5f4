import sys

from ulinf.cli import main

sys.exit(main())
