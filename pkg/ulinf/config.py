"""
Configuration for the ULINF toolkit
"""

import os
from dotenv import load_dotenv

load_dotenv()

# Reproducibility (99 is the seed of the pseudo-data recipe)
DEFAULT_SEED = int(os.getenv("ULINF_SEED", 99))

# Inference
DEFAULT_LEVEL = float(os.getenv("ULINF_LEVEL", 0.95))

# Simulation
DEFAULT_REPLICATIONS = int(os.getenv("ULINF_REPLICATIONS", 10000))
DEFAULT_WORKERS = int(os.getenv("ULINF_WORKERS", 1))

# Numerics
QUAD_ABS_TOL = float(os.getenv("ULINF_QUAD_ABS_TOL", 1e-10))
QUAD_REL_TOL = float(os.getenv("ULINF_QUAD_REL_TOL", 1e-10))
QUAD_LIMIT = int(os.getenv("ULINF_QUAD_LIMIT", 200))
MAX_ITER = int(os.getenv("ULINF_MAX_ITER", 500))

# Logging
LOG_LEVEL = os.getenv("ULINF_LOG_LEVEL", "WARNING")
