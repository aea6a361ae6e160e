import sys

from coverr.cli import main

sys.exit(main())
