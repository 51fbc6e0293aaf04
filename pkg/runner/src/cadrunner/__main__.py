import sys

from cadrunner.server import main

sys.exit(main())
