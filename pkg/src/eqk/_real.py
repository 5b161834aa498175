"""High-precision real arithmetic shared by every inexact code path."""

import os

import mpmath

DEFAULT_PRECISION_BITS = 170

ctx = mpmath.MPContext()
ctx.prec = max(int(os.environ.get("EQK_PRECISION_BITS", DEFAULT_PRECISION_BITS)), 64)

mpf = ctx.mpf
MPF = type(ctx.mpf(0))

#: Absolute tolerance for comparisons between high-precision reals.
REAL_TOL = mpf("1e-30")


def to_mpf(x):
    """Convert ints, Fractions, floats, strings or mpf values to ``mpf``."""
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, float):
        return mpf(x.numerator) / mpf(x.denominator)
    return mpf(x)
