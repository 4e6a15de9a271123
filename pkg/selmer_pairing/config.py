"""Configuration settings for selmer_pairing.

Defaults can be overridden through environment variables, read once at
import time.
"""

import os
from typing import Tuple


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


# Trial-division bound for factorization; composite cofactors above it are rejected
FACTOR_TRIAL_BOUND: int = _env_int("SELMER_FACTOR_BOUND", 10**6)

# Naive height bound for rational point search
DEFAULT_HEIGHT_BOUND: int = _env_int("SELMER_HEIGHT_BOUND", 10**4)

# Height bound used when corroborating refined rank bounds
EXTENDED_HEIGHT_BOUND: int = _env_int("SELMER_EXTENDED_HEIGHT_BOUND", 10**6)

# Non-torsion points listed in a report, lowest height first
REPORTED_POINTS_LIMIT: int = 32

# Residue-disc depth used by the Hilbert symbol oracle (mod p^2, and mod 8 plus two lifts)
ORACLE_PRECISION_ODD: int = 2
ORACLE_PRECISION_DYADIC: int = 5

# p-adic working precision is PADIC_BASE_PRECISION + v_p(2 * disc * d1 * d2)
PADIC_BASE_PRECISION: int = _env_int("SELMER_PADIC_PRECISION", 6)

# Number of precision doublings attempted before giving up
MAX_PRECISION_DOUBLINGS: int = _env_int("SELMER_MAX_DOUBLINGS", 4)

# Bits of the rational intervals used at the real place
REAL_BASE_BITS: int = _env_int("SELMER_REAL_BITS", 64)

# Height bound for the deterministic search of rational points on conics
CONIC_SEARCH_BOUND: int = _env_int("SELMER_CONIC_BOUND", 64)

# Odd primes of good reduction above this bound never contribute to the pairing
HASSE_EXCLUSION_BOUND: int = 17

# Candidate local points tried per place before reporting exhaustion
LOCAL_POINT_ATTEMPTS: int = _env_int("SELMER_LOCAL_POINT_ATTEMPTS", 48)

# Property-suite sample sizes
AUDIT_EXCLUDED_PLACES: int = 5
BILINEARITY_SAMPLES: int = _env_int("SELMER_BILINEARITY_SAMPLES", 8)
RECIPROCITY_PAIRS: int = 200
RECIPROCITY_COEFF_BOUND: int = 10**4
ORACLE_PAIRS: int = 100
ORACLE_COEFF_BOUND: int = 10**3
ORACLE_PRIME_BOUND: int = 50
DELTA_F_MIN_POINTS: int = 5
WELL_DEFINEDNESS_CHOICES: int = 3

# Root range of the test corpus y^2 = (x - e1)(x - e2)(x - e3)
CORPUS_ROOT_RANGE: Tuple[int, int] = (
    _env_int("SELMER_CORPUS_MIN", -10),
    _env_int("SELMER_CORPUS_MAX", 10),
)

# Appended to the default scan: no curve with roots in [-10, 10] has a pairing
# matrix of rank >= 2, while the one of y^2 = x^3 - 289x has rank 2
SCAN_SHOWCASE_CURVES: Tuple[Tuple[int, int, int], ...] = ((-17, 0, 17),)

DEFAULT_SEED: int = 0

# Worker threads for pairing-matrix entries (1 disables the pool)
DEFAULT_MAX_WORKERS: int = _env_int("SELMER_MAX_WORKERS", 1)

for _name, _value in (
    ("SELMER_FACTOR_BOUND", FACTOR_TRIAL_BOUND),
    ("SELMER_HEIGHT_BOUND", DEFAULT_HEIGHT_BOUND),
    ("SELMER_PADIC_PRECISION", PADIC_BASE_PRECISION),
    ("SELMER_REAL_BITS", REAL_BASE_BITS),
    ("SELMER_CONIC_BOUND", CONIC_SEARCH_BOUND),
    ("SELMER_LOCAL_POINT_ATTEMPTS", LOCAL_POINT_ATTEMPTS),
    ("SELMER_MAX_WORKERS", DEFAULT_MAX_WORKERS),
):
    if _value < 1:
        raise ValueError(f"{_name} must be positive, got {_value}")

if CORPUS_ROOT_RANGE[1] - CORPUS_ROOT_RANGE[0] < 2:
    raise ValueError(f"CORPUS_ROOT_RANGE must contain at least three integers, got {CORPUS_ROOT_RANGE}")
