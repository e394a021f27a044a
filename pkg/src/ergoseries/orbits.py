"""Exact orbits of x -> q*x mod 1 via integer arithmetic on rationals.

Every float is a dyadic rational, so any seed point is stored as a reduced
pair (num, den) and the orbit num -> q*num mod den is exact at every step.
Positions are emitted as float64 (one rounding per point), which keeps
trigonometric evaluations accurate to machine precision even for horizons
far beyond what iterated floating-point multiplication would survive.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import SchemaError

# int64 is safe while q*den stays below 2**62; larger denominators fall back
# to Python integers.
_INT64_LIMIT = 2**62


def as_rational(x) -> tuple[int, int]:
    """Reduce ``x`` to (num, den) with 0 <= num < den, den >= 1.

    Accepts floats (exact dyadic), Fractions, ints, and (num, den) pairs.
    """
    if isinstance(x, tuple):
        num, den = int(x[0]), int(x[1])
    elif isinstance(x, Fraction):
        num, den = x.numerator, x.denominator
    elif isinstance(x, (int, np.integer)):
        num, den = int(x), 1
    else:
        num, den = float(x).as_integer_ratio()
    if den <= 0:
        raise SchemaError("denominator must be positive")
    frac = Fraction(num, den)
    return frac.numerator % frac.denominator, frac.denominator


def orbit_positions(x, q: int, count: int) -> np.ndarray:
    """Positions x, Tx, ..., T^count x of T: y -> q*y mod 1, exactly.

    Returns an array of ``count + 1`` float64 values in [0, 1).
    """
    num, den = as_rational(x)
    out = np.empty(count + 1, dtype=np.float64)
    p = num
    for i in range(count + 1):
        out[i] = p / den
        p = (q * p) % den
    return out


def orbit_matrix(nums, den: int, q: int, count: int) -> np.ndarray:
    """Orbits of many seeds p_j/den at once; shape (len(nums), count+1).

    Uses vectorised int64 arithmetic when q*den fits, else Python integers.
    """
    den = int(den)
    nums = np.asarray(nums)
    if q * den < _INT64_LIMIT:
        p = nums.astype(np.int64) % den
        out = np.empty((len(p), count + 1), dtype=np.float64)
        for i in range(count + 1):
            out[:, i] = p / den
            p = (q * p) % den
        return out
    rows = [orbit_positions((int(n), den), q, count) for n in nums]
    return np.array(rows)


def detect_period(x, q: int, max_steps: int = 4096) -> tuple[int, int] | None:
    """Eventual period of the exact orbit of ``x`` under y -> q*y mod 1.

    Returns (preperiod, period) or None when no repeat occurs within
    ``max_steps`` iterations.  Rational seeds always repeat once the
    residue q^n * num mod den revisits a value.
    """
    num, den = as_rational(x)
    seen: dict[int, int] = {}
    p = num
    for step in range(max_steps + 1):
        if p in seen:
            return seen[p], step - seen[p]
        seen[p] = step
        p = (q * p) % den
    return None


def random_dyadic_seeds(rng: np.random.Generator, count: int, bits: int = 53):
    """Uniform dyadic rationals j/2**bits as (nums array, den)."""
    den = 1 << bits
    nums = rng.integers(0, den, size=count, dtype=np.int64)
    return nums, den
