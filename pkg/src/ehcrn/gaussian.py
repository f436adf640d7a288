"""Standard Gaussian upper-tail probability and its inverse.

The tail function is evaluated through the complementary error function,
which the C library computes with a high-accuracy rational approximation;
the inverse is a bracketing bisection on the tail function followed by a
Newton polish.  Accuracy of both is far below the Monte-Carlo noise floor
of any simulation in this package.
"""

import math

_SQRT2 = math.sqrt(2.0)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

# Q(x) for |x| > 39 is outside the double-precision range of p in (0, 1),
# so [-40, 40] brackets the root for every representable probability.
_BRACKET = 40.0


def q_tail(x: float) -> float:
    """Upper-tail probability P(Z > x) of a standard normal variable Z."""
    return 0.5 * math.erfc(x / _SQRT2)


def _pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT_TWO_PI


def q_tail_inverse(p: float) -> float:
    """Solve ``q_tail(x) == p`` for x, with p in the open interval (0, 1).

    Bisection narrows [-40, 40] down to roughly one ulp (the tail function
    is strictly decreasing), then two guarded Newton steps polish the root.

    Raises:
        ValueError: if p is not strictly between 0 and 1.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    lo, hi = -_BRACKET, _BRACKET
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if q_tail(mid) > p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(2):
        d = _pdf(x)
        if d <= 0.0 or not math.isfinite(d):
            break
        x += (q_tail(x) - p) / d
    return x
