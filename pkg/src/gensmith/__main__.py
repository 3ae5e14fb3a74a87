import sys

from gensmith.cli import main

sys.exit(main())
