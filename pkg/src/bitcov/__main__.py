import sys

from bitcov.cli import main

sys.exit(main())
