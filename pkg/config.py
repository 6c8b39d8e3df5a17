"""
Configuration for the Leibniz workbench.
Contains sampling bounds, numeric tolerances and search parameters.
In a deployment these could be overridden per run through the CLI flags.
"""

from typing import Dict

# Versioning, stamped on every report
WORKBENCH_VERSION = "1.0.0"

# Randomized checks
DEFAULT_SEED = 0
GATE_SAMPLE_COUNT = 100         # prefix gate inside solve_next
ACCEPTANCE_SAMPLE_COUNT = 1000  # post-hoc validation of an extension
CANONICAL_CHECK_SAMPLES = 5     # prefix comparison behind the default decomposition reference

# Random rational functions used as sample points
SAMPLING_BOUNDS: Dict[str, int] = {
    "max_numerator": 9,    # coefficients p/q with |p| <= 9
    "max_denominator": 9,  # and 1 <= q <= 9
    "max_degree": 4,       # total degree of every monomial
    "numerator_terms": 3,
    "denominator_terms": 2,
}

# Floating evaluation
POLE_TOLERANCE = 1e-12           # relative to the magnitude of the denominator terms
HOMOMORPHISM_TOLERANCE = 1e-9

# Independence search
DEFAULT_DEGREE_BOUND = 4
DEFAULT_WITNESS_BUDGET = 200
DEFAULT_CERTIFICATE_BOUND = 3

# Density search
PIVOT_THRESHOLD = 1e-8           # pivots below this fraction of the largest are rejected
INITIAL_MAX_DENOMINATOR = 10**6
MAX_DENSITY_RETRIES = 30
DEFAULT_DENSITY_EPS = 1e-6
DENSITY_ASSUMPTION = (
    "generator values are treated as algebraically independent transcendentals"
)

# Logging configuration
LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
