import sys

from equivlab.cli import main

sys.exit(main())
