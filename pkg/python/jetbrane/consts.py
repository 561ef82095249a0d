import os

ENGINE_VERSION = "0.1.0"
REPORT_SCHEMA_VERSION = "2"

# bounded ansatz defaults for weak equality
DEFAULT_MAX_JET_ORDER = 2
DEFAULT_MAX_COEFF_DEGREE = 2
DEFAULT_MAX_COEFF_JET_ORDER = 2
DEFAULT_CLOSURE_JET_ORDER = None
DEFAULT_MAX_UNKNOWNS = 20000

DEFAULT_SAMPLES = 20
DEFAULT_SEED = 0

MAX_DIM = 4

THREADS_ENV = "JETBRANE_THREADS"


def thread_count() -> int:
    value = os.getenv(THREADS_ENV)
    if value is None or not value.strip():
        return os.cpu_count() or 1
    try:
        return max(1, int(value))
    except ValueError:
        return os.cpu_count() or 1
