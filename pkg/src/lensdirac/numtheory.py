"""Exact integer helpers shared by the lattice and spectrum code.

Everything here is arbitrary-precision: multiplicity counts grow like
k^(2m-2) and overflow any fixed-width type long before the ranges the
census needs, so counts are plain Python ints throughout the package.
All residue arithmetic supports q = 1 (the sphere) as a degenerate but
valid modulus.
"""

from __future__ import annotations

import math


class NotInvertible(ValueError):
    """Raised when an inverse mod q is requested for gcd(a, q) != 1."""


def mod_inverse(a: int, q: int) -> int:
    """Inverse of a modulo q, in [0, q).

    For q = 1 every residue is 0 and 0 is its own inverse.
    """
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    if q == 1:
        return 0
    if math.gcd(a, q) != 1:
        raise NotInvertible(f"{a} is not invertible mod {q}")
    return pow(a, -1, q)


def units(q: int) -> list[int]:
    """Residues in [0, q) coprime to q, ascending.

    units(1) == [0]: the single residue class mod 1 counts as the unit.
    """
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    if q == 1:
        return [0]
    return [a for a in range(1, q) if math.gcd(a, q) == 1]


def binomial(n: int, k: int) -> int:
    """binom(n, k), exact; 0 for k < 0 or k > n."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)
