"""Exact arithmetic in F_p for primes p with p % 4 == 3."""

from __future__ import annotations

from enum import Enum

import numpy as np


class NotPrime(ValueError):
    """Modulus candidate is composite or smaller than 2."""


class WrongResidueClass(ValueError):
    """Prime modulus is not congruent to 3 mod 4."""


class NotASquare(ValueError):
    """Square root requested for a quadratic non-residue."""


class Squareness(Enum):
    ZERO = "zero"
    SQUARE = "square"
    NONSQUARE = "nonsquare"


def _is_prime(n: int) -> bool:
    # Trial division; moduli here are desk-scale.
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class PrimeModulus:
    """A validated prime p = 3 (mod 4) plus its table of nonzero squares.

    ``residue_table[a]`` is True iff a is a nonzero square mod p; the table
    makes square classification O(1). Instances are immutable.
    """

    __slots__ = ("p", "residue_table", "_inv4")

    def __init__(self, n: int):
        if n < 3 or not _is_prime(n):
            raise NotPrime(f"{n} is not an odd prime")
        if n % 4 != 3:
            raise WrongResidueClass(f"{n} = {n % 4} (mod 4), need 3 (mod 4)")
        table = np.zeros(n, dtype=bool)
        for a in range(1, n):
            table[(a * a) % n] = True
        table.setflags(write=False)
        self.p = n
        self.residue_table = table
        self._inv4 = pow(4, -1, n)
        assert int(table.sum()) == (n - 1) // 2
        assert not table[n - 1]  # -1 is a non-square when p = 3 (mod 4)

    def __repr__(self) -> str:
        return f"PrimeModulus({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeModulus) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeModulus", self.p))


def make_modulus(n: int) -> PrimeModulus:
    """Validate n as a prime = 3 (mod 4) and precompute its square table."""
    return PrimeModulus(n)


def is_square(modulus: PrimeModulus, a: int) -> Squareness:
    """Classify a mod p as zero, a nonzero square, or a non-square."""
    a %= modulus.p
    if a == 0:
        return Squareness.ZERO
    return Squareness.SQUARE if modulus.residue_table[a] else Squareness.NONSQUARE


def sqrt_mod(modulus: PrimeModulus, a: int) -> int:
    """Canonical square root of a mod p: the smaller of the two roots.

    Uses the exponent shortcut r = a^((p+1)/4) available when p = 3 (mod 4).
    """
    p = modulus.p
    a %= p
    if a == 0:
        return 0
    if not modulus.residue_table[a]:
        raise NotASquare(f"{a} is not a square mod {p}")
    s = pow(a, (p + 1) // 4, p)
    return min(s, p - s)


def inv_mod(modulus: PrimeModulus, a: int) -> int:
    """Multiplicative inverse of a mod p."""
    a %= modulus.p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {modulus.p}")
    return pow(a, -1, modulus.p)


def primes_3_mod_4(lo: int, hi: int) -> list[int]:
    """All primes p = 3 (mod 4) with lo <= p <= hi."""
    lo = max(lo, 3)
    return [n for n in range(lo, hi + 1) if n % 4 == 3 and _is_prime(n)]
