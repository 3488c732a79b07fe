import sys

from freeprod.cli import main

sys.exit(main())
