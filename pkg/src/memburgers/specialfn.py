"""Gamma function on the positive reals.

Every coefficient in this package (memory weights, manufactured forcings,
exact solutions) is expressed through Gamma(q) for q drawn from a small
positive range, roughly (0, 4).  The stdlib implementation is a
Lanczos-style rational approximation accurate to a few ulp there, which is
far below the 1e-13 relative error this package needs, so we delegate to it
and only add domain validation.
"""

from __future__ import annotations

import math

__all__ = ["gamma"]


def gamma(q: float) -> float:
    """Return Gamma(q) for q > 0.

    Raises ValueError for q <= 0 (poles and the reflection half-line are
    out of scope) and for non-finite q.
    """
    q = float(q)
    if not math.isfinite(q):
        raise ValueError(f"gamma: argument must be finite, got {q!r}")
    if q <= 0.0:
        raise ValueError(f"gamma: argument must be positive, got {q!r}")
    return math.gamma(q)
