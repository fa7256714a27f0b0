import sys

from densim.cli import main

sys.exit(main())
