# Copyright (c) 2024, Palak P and contributors
# For license information, please see license.txt

"""Package-wide tolerances and defaults. All physics is in hbar = 1 units."""

import logging
import sys

# * STATE INVARIANTS
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-8
PSD_TOL = 1e-8
NORMALIZATION_DEFICIT_TOL = 1e-6
EIGENVALUE_FLOOR = 1e-12

# * FINITE-DIMENSIONAL MEASUREMENTS
COMPLETENESS_TOL = 1e-10
NEGLIGIBLE_PROBABILITY = 1e-12

# * SMEARING
MIN_RESOLVED_SIGMA_STEPS = 2.0
BOX_HALF_WIDTH_FACTOR = 8.0

# ? DIRECT QUADRATURE BELOW THIS SIZE, FFT ABOVE
DIRECT_TRANSFORM_MAX_N = 512

# * REGIME CLASSIFICATION
DEFAULT_REGIME_FACTOR = 3.0

# * DEFAULT RUN
DEFAULT_GRID = {"x_min": -12.0, "x_max": 12.0, "n": 512}
DEFAULT_SEED = 0

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level=logging.INFO):
	"""Install a single stderr handler on the package logger."""
	logger = logging.getLogger("smeared_measurement")
	if not any(getattr(h, "_smeared_measurement", False) for h in logger.handlers):
		handler = logging.StreamHandler(sys.stderr)
		handler.setFormatter(logging.Formatter(LOG_FORMAT))
		handler._smeared_measurement = True
		logger.addHandler(handler)
	logger.setLevel(level)
	return logger
