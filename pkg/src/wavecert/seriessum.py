"""Series summation with integral-test tail remainders.

Two families appear in the constant ledger: zeta-like sums ``sum k^-s`` with
s > 1, summed directly to N terms with an Euler-Maclaurin corrected integral
tail whose error is certified by the first omitted term, and geometrically
damped sums ``sum (j+1)^a r^j`` whose tail is bounded by a geometric
majorant.  Term counts grow until the certified remainder falls below the
requested fraction of the partial sum.
"""

from __future__ import annotations

import numpy as np

_REL_TAIL = 1e-12


def power_sum(s: float, *, scale: int = 1, rel_tail: float = _REL_TAIL) -> float:
    """``sum_{k>=1} k^-s`` for s > 1 to certified relative accuracy.

    The tail past N uses the Euler-Maclaurin expansion
    ``int_N^inf x^-s dx - N^-s/2 + s N^-(s+1)/12`` whose error is below the
    next term ``s(s+1)(s+2) N^-(s+3)/720``; N doubles until that bound is a
    ``rel_tail`` fraction of the sum.  ``scale`` multiplies the starting N.
    """
    if not s > 1.0:
        raise ValueError(f"series exponent must exceed 1, got {s}")
    n = 64 * max(int(scale), 1)
    for _ in range(24):
        k = np.arange(1, n + 1, dtype=float)
        partial = float(np.sum(np.sort(k**-s)))
        tail = n ** (1.0 - s) / (s - 1.0) - 0.5 * n**-s + s * n ** (-s - 1.0) / 12.0
        err = s * (s + 1.0) * (s + 2.0) * n ** (-s - 3.0) / 720.0
        total = partial + tail
        if err <= rel_tail * total:
            return total
        n *= 2
    return total


def damped_power_sum(a: float, r: float, *, scale: int = 1,
                     rel_tail: float = _REL_TAIL) -> float:
    """``sum_{j>=0} (j+1)^a r^j`` for 0 < r < 1, a >= 0, with geometric tail.

    Past J with ratio bound q = ((J+2)/(J+1))^a * r < 1 the tail is at most
    ``term(J+1) / (1 - q)``.
    """
    if not 0.0 < r < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    total = 0.0
    j = 0
    while True:
        term = (j + 1.0) ** a * r**j
        total += term
        q = ((j + 3.0) / (j + 2.0)) ** a * r
        nxt = (j + 2.0) ** a * r ** (j + 1)
        if q < 1.0 and nxt / (1.0 - q) <= rel_tail * total and j >= 8 * max(scale, 1):
            return total + nxt / (1.0 - q)
        j += 1
        if j > 100000:
            raise RuntimeError("damped series failed to converge")
