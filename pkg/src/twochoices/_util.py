"""Small shared helpers."""

import math

# Tolerance for float products that are meant to be integers: 0.55 * 20
# evaluates to 11.000000000000002, and a plain ceil would round that to 12.
_CEIL_EPS = 1e-9


def ceil_count(p: float, n: int) -> int:
    """Number of agents seeded with opinion 1: the ceiling of p*n.

    Products within _CEIL_EPS of an integer are treated as that integer.
    """
    return math.ceil(p * n - _CEIL_EPS)
