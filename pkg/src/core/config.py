"""Configuration settings for the rough Kuramoto toolkit."""

import os

DEBUG = os.getenv("RKM_DEBUG", "0") in ("1", "true", "True")

# Output locations
OUTPUT_DIR = os.getenv("RKM_OUTPUT_DIR", "./runs")

# Sweep execution
WORKERS = int(os.getenv("RKM_WORKERS", "1"))

# Graph analysis
CHEEGER_MAX_N = int(os.getenv("RKM_CHEEGER_MAX_N", "20"))
ZERO_EIGEN_RTOL = 1e-9
EDGE_THRESHOLD = 1e-14

# Rough path settings
DEFAULT_CP = float(os.getenv("RKM_CP", "1.0"))
DEFAULT_P = 2.5
MIN_EN_TRIALS = 30
MIN_MOMENT_SAMPLES = 100

# Number of sampled states for C_G
CG_SAMPLES = int(os.getenv("RKM_CG_SAMPLES", "10000"))

# Integration
BLOWUP_GUARD = 1e6

# Diagnostics
DECAY_FLOOR = 1e-13
MIN_FIT_POINTS = 10
DEFAULT_TAIL_FRACTION = 0.5
SYNC_TOLERANCE = 1e-2
SMOOTHING_WINDOWS = (0.01, 0.05, 0.2)
LIPSCHITZ_SAMPLES = 2000


def get_workers() -> int:
    """Get the sweep worker count, with informative error if misconfigured."""
    if WORKERS < 1:
        raise ValueError("RKM_WORKERS must be a positive integer")
    return WORKERS
