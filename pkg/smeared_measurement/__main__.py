import sys

from smeared_measurement.cli import main

sys.exit(main())
