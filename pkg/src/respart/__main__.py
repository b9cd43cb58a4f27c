import sys

from respart.cli import main

sys.exit(main())
