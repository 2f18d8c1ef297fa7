"""Circles of F_p^2 and the exact coefficients of their translation product.

A circle C_k is the set of plane points at quadrance k = x^2 + y^2 from the
origin. Translating a random point of C_i by a random point of C_j lands on
C_k with probability n_ij^k; those coefficients make the p circles a
finite hypergroup. Everything here is exact: coefficients are rationals
with denominator p + 1 (identity rows aside), and the brute-force counter
is kept fully independent of the closed form so each can check the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .modular import PrimeModulus, Squareness, is_square, sqrt_mod

# Dense coefficient tables hold p^3 small ints; keep them desk-scale.
DENSE_TABLE_LIMIT = 512


def _check_index(p: int, k: int) -> None:
    if not 0 <= k < p:
        raise IndexError(f"circle index {k} out of range [0, {p})")


def quadrance(modulus: PrimeModulus, x: int, y: int) -> int:
    """Quadrance of the plane point (x, y): x^2 + y^2 mod p."""
    return (x * x + y * y) % modulus.p


def circle_points(modulus: PrimeModulus, k: int) -> list[tuple[int, int]]:
    """All points of the circle with quadrance k, sorted lexicographically.

    For each x the circle equation needs y^2 = k - x^2, so x contributes
    two points, one point, or none according to the squareness of k - x^2.
    """
    p = modulus.p
    _check_index(p, k)
    pts = []
    for x in range(p):
        rest = (k - x * x) % p
        cls = is_square(modulus, rest)
        if cls is Squareness.ZERO:
            pts.append((x, 0))
        elif cls is Squareness.SQUARE:
            r = sqrt_mod(modulus, rest)
            pts.append((x, r))
            pts.append((x, p - r))
    pts.sort()
    return pts


def circle_size(modulus: PrimeModulus, k: int) -> int:
    """|C_0| = 1 and |C_k| = p + 1 otherwise."""
    _check_index(modulus.p, k)
    return 1 if k == 0 else modulus.p + 1


class StructureTensor:
    """Exact accessor for the product coefficients n_ij^k.

    Zero indices are the identity: a step of quadrance 0 stays put, so
    n_0j^k = [k == j] and n_i0^k = [k == i]. For nonzero i, j the value is
    governed by the squareness of V = ij - (k-i-j)^2 / 4 in F_p:
    non-square gives 0, zero gives 1/(p+1), nonzero square gives 2/(p+1).

    ``scaled`` returns numerators over the common denominator p + 1; the
    dense table of those numerators is built lazily and only for p up to
    DENSE_TABLE_LIMIT.
    """

    def __init__(self, modulus: PrimeModulus):
        self.modulus = modulus
        self._table: np.ndarray | None = None

    @property
    def p(self) -> int:
        return self.modulus.p

    def constant(self, i: int, j: int, k: int) -> Fraction:
        """n_ij^k as an exact rational."""
        return Fraction(self.scaled(i, j, k), self.p + 1)

    def scaled(self, i: int, j: int, k: int) -> int:
        """Numerator of n_ij^k over the common denominator p + 1."""
        p = self.p
        _check_index(p, i)
        _check_index(p, j)
        _check_index(p, k)
        if i == 0:
            return (p + 1) * (k == j)
        if j == 0:
            return (p + 1) * (k == i)
        v = (i * j - (k - i - j) ** 2 * self.modulus._inv4) % p
        if v == 0:
            return 1
        return 2 if self.modulus.residue_table[v] else 0

    def scaled_table(self) -> np.ndarray:
        """Dense (p, p, p) int32 table of scaled numerators, memoized.

        Built one i-slice at a time so temporaries stay O(p^2).
        """
        if self._table is None:
            p = self.p
            if p > DENSE_TABLE_LIMIT:
                raise ValueError(
                    f"dense table for p={p} exceeds limit {DENSE_TABLE_LIMIT}"
                )
            j = np.arange(p, dtype=np.int64).reshape(p, 1)
            k = np.arange(p, dtype=np.int64).reshape(1, p)
            table = np.empty((p, p, p), dtype=np.int32)
            for i in range(p):
                v = (i * j - (k - i - j) ** 2 * self.modulus._inv4) % p
                block = np.where(self.modulus.residue_table[v], 2, 0)
                block[v == 0] = 1
                table[i] = block
            eye = (p + 1) * np.eye(p, dtype=np.int32)
            table[0, :, :] = eye
            table[:, 0, :] = eye
            table.setflags(write=False)
            self._table = table
        return self._table


def structure_constant(tensor: StructureTensor, i: int, j: int, k: int) -> Fraction:
    """Closed-form n_ij^k."""
    return tensor.constant(i, j, k)


def pair_quadrance_counts(modulus: PrimeModulus, i: int, j: int) -> np.ndarray:
    """Histogram over k of quadrance(a + b) for all (a, b) in C_i x C_j.

    Direct enumeration of point pairs; this is the counting definition of
    the product and deliberately shares no code with the closed form.
    """
    p = modulus.p
    pi = np.asarray(circle_points(modulus, i), dtype=np.int64).reshape(-1, 2)
    pj = np.asarray(circle_points(modulus, j), dtype=np.int64).reshape(-1, 2)
    x = (pi[:, 0][:, None] + pj[:, 0][None, :]) % p
    y = (pi[:, 1][:, None] + pj[:, 1][None, :]) % p
    q = (x * x + y * y) % p
    return np.bincount(q.ravel(), minlength=p)


def structure_constant_bruteforce(
    modulus: PrimeModulus, i: int, j: int, k: int
) -> Fraction:
    """n_ij^k by counting point pairs, the oracle for the closed form."""
    _check_index(modulus.p, k)
    counts = pair_quadrance_counts(modulus, i, j)
    total = circle_size(modulus, i) * circle_size(modulus, j)
    return Fraction(int(counts[k]), total)


def triple_support(
    tensor: StructureTensor, i: int, j: int, k: int, l: int
) -> bool:
    """Whether the triple product coefficient of c_l in c_i c_j c_k is positive.

    The coefficient is sum_t n_ij^t * n_tk^l; positivity only needs one
    nonzero term, checked in exact integers.
    """
    p = tensor.p
    for idx in (i, j, k, l):
        _check_index(p, idx)
    return any(
        tensor.scaled(i, j, t) > 0 and tensor.scaled(t, k, l) > 0 for t in range(p)
    )


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    witness: tuple[int, ...] | None = None


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of the five hypergroup axiom checks, with counterexamples."""

    positivity: AxiomCheck
    normalization: AxiomCheck
    commutativity: AxiomCheck
    hermitian_support: AxiomCheck
    associativity: AxiomCheck

    def checks(self) -> list[AxiomCheck]:
        return [
            self.positivity,
            self.normalization,
            self.commutativity,
            self.hermitian_support,
            self.associativity,
        ]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks())


def _first_witness(bad: np.ndarray) -> tuple[int, ...] | None:
    where = np.argwhere(bad)
    return tuple(int(v) for v in where[0]) if where.size else None


def validate_axioms(tensor: StructureTensor) -> AxiomReport:
    """Check positivity, normalization, commutativity, hermitian support
    at index 0, and associativity, all in exact integer arithmetic.

    Works on numerators over the common denominator p + 1, so every
    comparison is exact. Associativity compares sum_t n_ij^t n_tk^m with
    sum_t n_jk^t n_it^m for all quadruples, processed one i at a time to
    keep memory at O(p^3); the contracted values stay below (p+1)^2, so
    int32 arithmetic is exact.
    """
    p = tensor.p
    e = tensor.scaled_table()

    pos_bad = e < 0
    positivity = AxiomCheck("positivity", not pos_bad.any(), _first_witness(pos_bad))

    norm_bad = e.sum(axis=2, dtype=np.int64) != p + 1
    normalization = AxiomCheck(
        "normalization", not norm_bad.any(), _first_witness(norm_bad)
    )

    comm_bad = e != e.transpose(1, 0, 2)
    commutativity = AxiomCheck(
        "commutativity", not comm_bad.any(), _first_witness(comm_bad)
    )

    nz = np.arange(1, p)
    herm_bad = (e[1:, 1:, 0] > 0) != np.eye(p - 1, dtype=bool)
    herm_witness = None
    if herm_bad.any():
        a, b = np.argwhere(herm_bad)[0]
        herm_witness = (int(nz[a]), int(nz[b]))
    hermitian_support = AxiomCheck(
        "hermitian_support", not herm_bad.any(), herm_witness
    )

    assoc_witness = None
    flat = e.reshape(p * p, p)
    for i in range(p):
        lhs = e[i] @ e.reshape(p, p * p)  # [j, k*m] = sum_t e[i,j,t] e[t,k,m]
        rhs = (flat @ e[i]).reshape(p, p, p)  # [j, k, m] = sum_t e[j,k,t] e[i,t,m]
        bad = lhs.reshape(p, p, p) != rhs
        if bad.any():
            j, k, m = np.argwhere(bad)[0]
            assoc_witness = (i, int(j), int(k), int(m))
            break
    associativity = AxiomCheck("associativity", assoc_witness is None, assoc_witness)

    return AxiomReport(
        positivity, normalization, commutativity, hermitian_support, associativity
    )
