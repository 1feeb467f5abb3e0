import sys

from tldg.cli import main

sys.exit(main())
