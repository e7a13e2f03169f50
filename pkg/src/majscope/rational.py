"""Exact thresholds.

All majority tests compare ``count * den > num * length`` on integers; a
float threshold would misclassify windows sitting exactly on the boundary.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import InvalidThreshold

_RATIO = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s*$")


def parse_ratio(text: str) -> Fraction:
    """Parse ``"NUM/DEN"``; decimals and bare integers are rejected."""
    m = _RATIO.match(text)
    if not m:
        raise InvalidThreshold(f"expected NUM/DEN, got {text!r}")
    num, den = int(m.group(1)), int(m.group(2))
    if den == 0:
        raise InvalidThreshold("zero denominator")
    return Fraction(num, den)


def as_threshold(tau) -> Fraction:
    """Coerce to a Fraction in (0, 1).

    Accepts a Fraction, a ``(num, den)`` pair or a ``"NUM/DEN"`` string.
    Floats are refused because they cannot represent 1/3 or 1/17 exactly.
    """
    if isinstance(tau, Fraction):
        t = tau
    elif isinstance(tau, str):
        t = parse_ratio(tau)
    elif isinstance(tau, tuple) and len(tau) == 2:
        if tau[1] == 0:
            raise InvalidThreshold("zero denominator")
        t = Fraction(int(tau[0]), int(tau[1]))
    else:
        raise InvalidThreshold(f"threshold must be exact, got {tau!r}")
    if not 0 < t < 1:
        raise InvalidThreshold(f"threshold {t} outside (0, 1)")
    return t


def exceeds(count, length, tau: Fraction):
    """``count > tau * length``, exactly; works elementwise on numpy arrays."""
    return count * tau.denominator > tau.numerator * length


def ceil_lg_inverse(tau: Fraction) -> int:
    """Smallest t with 2**t >= 1/tau."""
    t = 0
    while (tau.numerator << t) < tau.denominator:
        t += 1
    return t
