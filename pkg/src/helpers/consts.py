"""
File for storing constant variables
"""

# Configs
CONFIG_FILENAME = "src/config/config.ini"  # Py Functions
QUADSEMI_DEBUG_CONFIG_TITLE = "quadsemi_debugger"  # Py Logger
TOLERANCE_CONFIG_TITLE = "tolerances"  # Common Classes
GRID_CONFIG_TITLE = "grids"  # Py Functions
ORACLE_CONFIG_TITLE = "oracle"  # Reporting
REPORTING_CONFIG_TITLE = "reporting"  # Reporting

# Environment
TOLERANCE_SCALE_ENV = "QUADSEMI_TOL"

# Built-in problem files
CATALOG_DIR = "src/catalog"
CATALOG_NAMES = ("free_schrodinger", "harmonic", "heat", "davies", "kfp")

# Process exit codes
EXIT_SUCCESS = 0
EXIT_HYPOTHESIS = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

# Output headers
BOUNDS_CSV_HEADER = ("t", "alpha", "envelope_p_q", "gamma_exp", "lower")
ALPHA_CSV_HEADER = ("t", "alpha")
SHARPNESS_CSV_HEADER = ("t", "lower_bound", "upper_envelope", "ratio")
ORACLE_CSV_HEADER = ("t", "corner", "oracle_norm", "predicted_envelope", "lower_bound")
LATTICE_CSV_HEADER = ("re", "im", "multiplicity")

# Supported (p, q) pairs for the sharpness suite
CATALOG_PQ_PAIRS = ((1.0, 1.0), (1.0, float("inf")), (2.0, 2.0), (2.0, float("inf")), (float("inf"), float("inf")))
