"""Tunables for free-channel-lab."""

import os

# Linear algebra tolerances
HERMITIAN_TOL = 1e-12        # max-entry asymmetry, scaled by max(1, ‖m‖_max)
PSD_CLAMP_TOL = 1e-8         # eigenvalues in [-tol, 0) are clamped to 0
PROFILE_CLAMP_TOL = 1e-10    # SpectralProfile clamp for PSD profiles
SPHERE_TOL = 1e-9            # two-level profiles must satisfy α^q + (k−1)β^q = 1 within this
STATE_TRACE_TOL = 1e-8       # channel inputs must have trace 1 within this
ENTROPY_TRACE_TOL = 1e-6     # von Neumann entropy refuses traces further off than this
EIGEN_FLOOR = 1e-10          # W below this is a near-singular frame
VERDICT_RTOL = 1e-12         # margins smaller than this (relative) do not count as violations

# Limit computations
BISECTION_ITERATIONS = 200
TWO_LEVEL_GRID = 2048        # α-grid density for the two-level MOpN limit
SHAPE_GRID = 48              # simplex resolution for the brute-force shape search

# Estimators
DEFAULT_RESTARTS = 8
MIN_RESTARTS = 4
MAX_ITERATIONS = 200
STALL_ROUNDS = 3             # stop after this many rounds without improvement
ASCENT_TOL = 1e-10
MOE_SURROGATE_P = 1.05
MOE_POLISH_ITERATIONS = 60
DENSE_EIGEN_CUTOFF = 160     # below this dimension use dense eigh instead of Lanczos

# Non-crossing oracle guards
NC_MAX_N = 12
NC2_MAX_N = 16
ORACLE_MAX_R = 4
ORACLE_MAX_K = 4
ORACLE_MAX_TERMS = 2_000_000  # (pairing, index) assignments enumerated per support

# Experiments
DEFAULT_EPSILON = 0.3
DEFAULT_TRIALS = 10
PROBE_COUNT = 8
PROBE_SEED = 20240917        # frozen seed of the f_n(A) probe set
DEFAULT_TOLERANCES = {
    "bulk_c1": 2.0,          # c1 · n^{-1/2}
    "edge_c2": 4.0,          # c2 · n^{-2/3}
}
PROBE_STATES = 16            # random pure inputs per trial for trace / deviation probes

# Reports
SCHEMA_VERSION = "1.0"
TOOL_VERSION = "0.3.0"
VIOLATION_CHUNK = 10_000     # rows per streamed violation-table chunk
PAIR_CHUNK_ENTRIES = 1 << 24  # complex entries per row slab of the Bell-pair Gram product

WORKERS = int(os.environ.get("LAB_WORKERS", "2"))
OUTPUT_DIR = os.environ.get("LAB_OUTPUT_DIR", "")
LOG_LEVEL = os.environ.get("LAB_LOG_LEVEL", "INFO")
