"""Eigenvalue and mixing-time bounds for the circle walk.

The kernel is reversible, so conjugating by the square root of the
invariant law turns it into a symmetric matrix whose spectrum bounds the
speed of convergence:

* a path assignment between an auxiliary chain and the walk bounds the
  second-largest eigenvalue through the congestion constant A
  (``comparison_bound``);
* a family of odd closed walks bounds the smallest eigenvalue away from
  -1 through the constant v (``odd_cycle_bound``);
* the spectral radius then converts into a per-step total-variation
  envelope (``spectral_tv_bound``);
* independently, a four-step minorization of the kernel by the invariant
  law gives a geometric coupling bound on the mixing time
  (``coupling_bound``, ``minorization_check``).

Closed-form versions of the congestion and cycle constants are kept as
reference lines next to the computed ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .circles import StructureTensor
from .modular import PrimeModulus
from .walk import (
    DEFAULT_EPSILON,
    BadEpsilon,
    Distribution,
    StochasticKernel,
    build_kernel,
    detailed_balance,
    mixing_time,
    stationary,
)

# K^4 is computed in exact integers up to here; float64 with slack above.
MINORIZATION_EXACT_GATE = 199

PathAssignment = Mapping[tuple[int, int], Sequence[int]]
CycleCollection = Mapping[int, Sequence[int]]


class NotReversible(ValueError):
    """Kernel fails detailed balance for the supplied distribution."""


class MissingPath(ValueError):
    """A support pair of the auxiliary chain has no assigned path."""


class InvalidPathEdge(ValueError):
    """A path step leaves the kernel support or repeats an edge."""


class EvenCycle(ValueError):
    """Cycle collections need an odd number of edges per cycle."""


class InvalidCycleEdge(ValueError):
    """A cycle step leaves the kernel support or repeats an edge."""


class NoOddCycle(RuntimeError):
    """No odd closed walk found through a state (non-ergodic kernel)."""


class PathConstructionFailed(RuntimeError):
    """No intermediate state links a pair (non-ergodic kernel)."""


@dataclass(frozen=True)
class SpectrumReport:
    """Descending spectrum of the symmetrized kernel.

    ``alpha_star`` is the spectral radius away from the top eigenvalue:
    max(lambda_1, |lambda_min|) with 0-based descending indexing, and
    ``gap`` is 1 - lambda_1.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    matrix: np.ndarray
    alpha_star: float
    gap: float

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1])


def spectrum(kernel: StochasticKernel, dist: Distribution) -> SpectrumReport:
    """All eigenvalues of the kernel, via its symmetrization.

    Detailed balance makes sqrt(pi(x)/pi(y)) K(x, y) symmetric; it is
    computed here as sqrt(K(x,y) K(y,x)), which is symmetric in float64 by
    construction and equal to the conjugated kernel under reversibility.
    """
    check = detailed_balance(kernel, dist)
    if not check.ok:
        raise NotReversible(f"detailed balance fails at pair {check.witness}")
    k = kernel.matrix
    sym = np.sqrt(k * k.T)
    evals, evecs = np.linalg.eigh(sym)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]
    if abs(evals[0] - 1.0) > 1e-9:
        raise ValueError(f"top eigenvalue {evals[0]} is not 1")
    if evals[0] > 1 + 1e-9 or evals[-1] < -1 - 1e-9:
        raise ValueError("eigenvalue outside [-1, 1]")
    alpha_star = float(max(evals[1], abs(evals[-1]))) if len(evals) > 1 else 1.0
    return SpectrumReport(
        eigenvalues=evals,
        eigenvectors=evecs,
        matrix=sym,
        alpha_star=alpha_star,
        gap=float(1.0 - evals[1]) if len(evals) > 1 else 0.0,
    )


def dirichlet_form(
    kernel: StochasticKernel, dist: Distribution, f: np.ndarray
) -> float:
    """Energy of f under the kernel: half the pi-and-K weighted sum of
    squared differences over all ordered pairs."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (kernel.p,):
        raise ValueError(f"f must have shape ({kernel.p},)")
    pi = dist.to_array()
    diff = f[:, None] - f[None, :]
    return float(0.5 * (diff**2 * (pi[:, None] * kernel.matrix)).sum())


def equilibrium_kernel(modulus: PrimeModulus) -> StochasticKernel:
    """The rank-one chain whose every row is the invariant law."""
    p = modulus.p
    w = np.full(p, p + 1, dtype=np.int64)
    w[0] = 1
    scaled = np.tile(w, (p, 1))
    return StochasticKernel(scaled, p * p)


def _support_pairs(kernel: StochasticKernel) -> np.ndarray:
    return kernel.scaled > 0


def _validate_path(
    pair: tuple[int, int], path: Sequence[int], support: np.ndarray
) -> list[tuple[int, int]]:
    x, y = pair
    path = list(path)
    if len(path) < 2 or path[0] != x or path[-1] != y:
        raise InvalidPathEdge(f"path for {pair} must run from {x} to {y}")
    edges = list(zip(path, path[1:]))
    seen = set()
    for z, w in edges:
        if not support[z, w]:
            raise InvalidPathEdge(f"path for {pair} uses non-edge ({z}, {w})")
        if (z, w) in seen:
            raise InvalidPathEdge(f"path for {pair} repeats edge ({z}, {w})")
        seen.add((z, w))
    return edges


@dataclass(frozen=True)
class ComparisonBound:
    """Congestion constant A and mass ratio a of a two-chain comparison.

    For eigenvalues it yields alpha_i <= 1 - (a/A)(1 - alpha'_i), where
    the primed values belong to the auxiliary chain.
    """

    A: float
    a: float

    def alpha_upper(self, alpha_prime: float = 0.0) -> float:
        return 1.0 - (self.a / self.A) * (1.0 - alpha_prime)


def comparison_bound(
    kernel: StochasticKernel,
    dist: Distribution,
    other_kernel: StochasticKernel,
    other_dist: Distribution,
    paths: PathAssignment,
) -> ComparisonBound:
    """Evaluate the path-congestion constant

        A = max over edges (z, w) of
            sum over assigned paths through (z, w) of
                |path| pi'(x) K'(x, y),  divided by pi(z) K(z, w),

    where each off-diagonal support pair (x, y) of the auxiliary chain
    must carry a path along support edges of the base chain.
    """
    p = kernel.p
    if other_kernel.p != p or len(dist) != p or len(other_dist) != p:
        raise ValueError("chains must share one state space")
    support = _support_pairs(kernel)
    pi = dist.to_array()
    other_pi = other_dist.to_array()
    other_k = other_kernel.matrix

    congestion: dict[tuple[int, int], float] = {}
    for x in range(p):
        for y in range(p):
            if x == y or other_k[x, y] == 0.0:
                continue
            path = paths.get((x, y))
            if path is None:
                raise MissingPath(f"no path for support pair ({x}, {y})")
            edges = _validate_path((x, y), path, support)
            load = len(edges) * other_pi[x] * other_k[x, y]
            for e in edges:
                congestion[e] = congestion.get(e, 0.0) + load

    best = 0.0
    for (z, w), total in congestion.items():
        best = max(best, total / (pi[z] * kernel.matrix[z, w]))
    a = float((other_pi / pi).min())
    return ComparisonBound(A=float(best), a=a)


def default_paths(modulus: PrimeModulus) -> dict[tuple[int, int], tuple[int, ...]]:
    """Canonical paths from every circle to every other along walk edges.

    The pair with smaller index first gets: the direct edge for (0, 1); a
    three-edge route 0, 1, k, y otherwise when leaving 0; and a two-edge
    route x, k, y between nonzero circles. Intermediates take the smallest
    index that keeps both hops on support edges; the swapped pair reuses
    the route reversed.
    """
    kernel = build_kernel(StructureTensor(modulus))
    support = _support_pairs(kernel)
    p = modulus.p
    paths: dict[tuple[int, int], tuple[int, ...]] = {}
    for r in range(p):
        for s in range(r + 1, p):
            if r == 0:
                if s == 1:
                    route = (0, 1)
                else:
                    mid = np.flatnonzero(support[1] & support[:, s])
                    if mid.size == 0:
                        raise PathConstructionFailed(f"no mid-state for (0, {s})")
                    route = (0, 1, int(mid[0]), s)
            else:
                mid = np.flatnonzero(support[r] & support[:, s])
                if mid.size == 0:
                    raise PathConstructionFailed(f"no mid-state for ({r}, {s})")
                route = (r, int(mid[0]), s)
            paths[(r, s)] = route
            paths[(s, r)] = tuple(reversed(route))
    return paths


@dataclass(frozen=True)
class OddCycleBound:
    """Odd-cycle congestion constant v and the bound lambda_min >= -1 + 2/v."""

    v: float
    alpha_min_lower: float


def cycle_length_by_chain(
    kernel: StochasticKernel, dist: Distribution, cycle: Sequence[int]
) -> float:
    """Sum of 1 / (pi(z) K(z, w)) over the traversed edges of a cycle."""
    pi = dist.to_array()
    k = kernel.matrix
    return float(
        sum(1.0 / (pi[z] * k[z, w]) for z, w in zip(cycle, cycle[1:]))
    )


def odd_cycle_bound(
    kernel: StochasticKernel, dist: Distribution, cycles: CycleCollection
) -> OddCycleBound:
    """Evaluate v = max over edges of the summed pi(x)-weighted chain
    lengths of the cycles traversing that edge, and the induced lower
    bound on the smallest eigenvalue.

    Every state must own one odd closed walk through itself along support
    edges, with no edge traversed twice within one walk.
    """
    p = kernel.p
    support = _support_pairs(kernel)
    pi = dist.to_array()

    congestion: dict[tuple[int, int], float] = {}
    for x in range(p):
        cycle = list(cycles[x])
        if len(cycle) < 2 or cycle[0] != x or cycle[-1] != x:
            raise InvalidCycleEdge(f"cycle for {x} must start and end at {x}")
        edges = list(zip(cycle, cycle[1:]))
        if len(edges) % 2 == 0:
            raise EvenCycle(f"cycle for {x} has {len(edges)} edges")
        seen = set()
        for z, w in edges:
            if not support[z, w]:
                raise InvalidCycleEdge(f"cycle for {x} uses non-edge ({z}, {w})")
            if (z, w) in seen:
                raise InvalidCycleEdge(f"cycle for {x} repeats edge ({z}, {w})")
            seen.add((z, w))
        weight = cycle_length_by_chain(kernel, dist, cycle) * pi[x]
        for e in edges:
            congestion[e] = congestion.get(e, 0.0) + weight

    v = float(max(congestion.values()))
    return OddCycleBound(v=v, alpha_min_lower=-1.0 + 2.0 / v)


def default_cycles(modulus: PrimeModulus) -> dict[int, tuple[int, ...]]:
    """A shortest odd closed walk through every circle along walk edges.

    Checks a self-loop first, then triangles, then five-edge walks, taking
    the lexicographically smallest vertex sequence at the first feasible
    length. Lengths beyond 5 are never needed for an ergodic circle walk.
    """
    kernel = build_kernel(StructureTensor(modulus))
    support = _support_pairs(kernel)
    p = modulus.p
    cycles: dict[int, tuple[int, ...]] = {}
    for x in range(p):
        cycles[x] = _shortest_odd_cycle(support, x, p)
    return cycles


def _distinct_edges(seq: Sequence[int]) -> bool:
    edges = list(zip(seq, seq[1:]))
    return len(edges) == len(set(edges))


def _shortest_odd_cycle(support: np.ndarray, x: int, p: int) -> tuple[int, ...]:
    if support[x, x]:
        return (x, x)
    # triangles x -> a -> b -> x, scanned in lexicographic (a, b) order
    grid = support[x][:, None] & support & support[:, x][None, :]
    for a, b in np.argwhere(grid):
        cand = (x, int(a), int(b), x)
        if _distinct_edges(cand):
            return cand
    # five-edge walks x -> a -> b -> c -> d -> x; only states with neither
    # a loop nor a triangle reach this, so the nesting stays cheap
    for a in np.flatnonzero(support[x]):
        for b in np.flatnonzero(support[int(a)]):
            for c in np.flatnonzero(support[int(b)]):
                for d in np.flatnonzero(support[int(c)] & support[:, x]):
                    cand5 = (x, int(a), int(b), int(c), int(d), x)
                    if _distinct_edges(cand5):
                        return cand5
    raise NoOddCycle(f"no odd closed walk of length <= 5 through state {x}")


@dataclass(frozen=True)
class ClosedFormBounds:
    """Reference constants: congestion A, cycle constant v, and the
    eigenvalue bounds they imply."""

    A: float
    v: float
    alpha1_upper: float
    alpha_min_lower: float


def closed_form_bounds(modulus: PrimeModulus) -> ClosedFormBounds:
    """Worst-case constants 3(p+3)(p+1)^2 / p^2 and 63(p+1) with the
    eigenvalue bounds 1 - 1/A and -1 + 2/v they induce."""
    p = modulus.p
    a_ref = 3 * (p + 3) * (p + 1) ** 2 / p**2
    v_ref = 63 * (p + 1)
    return ClosedFormBounds(
        A=a_ref,
        v=v_ref,
        alpha1_upper=1.0 - 1.0 / a_ref,
        alpha_min_lower=-1.0 + 2.0 / v_ref,
    )


def spectral_tv_bound(
    report: SpectrumReport, dist: Distribution, t: int
) -> float:
    """Per-step envelope: worst TV after t steps is at most
    alpha_star^t / (2 sqrt(min pi))."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    pi_min = float(min(dist.weights))
    return 0.5 * pi_min**-0.5 * report.alpha_star**t


def _contraction(p: int) -> Fraction:
    num = (1 + p) ** 4 - p * p * (p - 1)
    return Fraction(num, (1 + p) ** 4)


def smallest_contraction_power(p: int, epsilon: float = DEFAULT_EPSILON) -> int:
    """Smallest n with (1 - p^2 (p-1) / (1+p)^4)^n < epsilon.

    A float logarithm supplies the candidate; the strict inequality is
    then settled by exact rational powers so boundary rounding cannot
    shift n.
    """
    if not 0 < epsilon < 1:
        raise BadEpsilon(f"epsilon must be in (0, 1), got {epsilon}")
    c = _contraction(p)
    eps = Fraction(epsilon)
    n = max(1, math.ceil(math.log(epsilon) / math.log(float(c))))
    while c**n >= eps:
        n += 1
    while n > 1 and c ** (n - 1) < eps:
        n -= 1
    return n


@dataclass(frozen=True)
class CouplingBound:
    """Coupling mixing bound tau <= 4n, with the closed-form n for scale.

    ``n`` is the exact smallest power driving the contraction factor below
    the threshold; ``closed_form_n`` is ceil((1 + ln 2)(p+1)^4 / (p^2 (p-1))),
    always at least n.
    """

    p: int
    epsilon: float
    n: int
    tau_bound: int
    closed_form_n: int
    contraction: Fraction


def coupling_bound(
    modulus: PrimeModulus, epsilon: float = DEFAULT_EPSILON
) -> CouplingBound:
    """Mixing-time bound from the four-step minorization: tau <= 4n."""
    p = modulus.p
    n = smallest_contraction_power(p, epsilon)
    n8 = math.ceil((1 + math.log(2)) * (p + 1) ** 4 / (p * p * (p - 1)))
    return CouplingBound(
        p=p,
        epsilon=epsilon,
        n=n,
        tau_bound=4 * n,
        closed_form_n=n8,
        contraction=_contraction(p),
    )


@dataclass(frozen=True)
class MinorizationReport:
    """Entrywise check of K^4(i, j) >= claimed * pi(j).

    ``min_ratio`` is the smallest K^4(i, j) / pi(j); exact reports carry it
    as a Fraction. ``all_positive`` records strict positivity of K^4.
    """

    holds: bool
    min_ratio: Fraction | float
    claimed: Fraction
    witness: tuple[int, int] | None
    all_positive: bool
    exact: bool


def minorization_check(
    kernel: StochasticKernel, dist: Distribution, exact: bool | None = None
) -> MinorizationReport:
    """Verify the four-step minorization of the kernel by the invariant law.

    Exact mode raises the scaled kernel to the fourth power in integers
    (entries stay below denominator^4, safe for int64 at the gated sizes);
    float mode allows 1e-12 slack.
    """
    p = kernel.p
    if exact is None:
        exact = p <= MINORIZATION_EXACT_GATE
    claimed = Fraction(p * p * (p - 1), (1 + p) ** 4)
    pi = dist.weights

    if exact:
        if kernel.denominator**4 > np.iinfo(np.int64).max:
            raise ValueError("denominator too large for exact int64 powers")
        e2 = kernel.scaled @ kernel.scaled
        e4 = e2 @ e2
        den4 = kernel.denominator**4
        # entries of K^4 scale with pi only columnwise, so one exact ratio
        # per column suffices
        col_min = e4.min(axis=0)
        col_arg = e4.argmin(axis=0)
        min_ratio = None
        witness = None
        for j in range(p):
            ratio = Fraction(int(col_min[j]), den4) / pi[j]
            if min_ratio is None or ratio < min_ratio:
                min_ratio = ratio
                witness = (int(col_arg[j]), j)
        holds = min_ratio >= claimed
        all_positive = bool((e4 > 0).all())
    else:
        k4 = np.linalg.matrix_power(kernel.matrix, 4)
        pif = dist.to_array()
        ratios = k4 / pif[None, :]
        flat = int(np.argmin(ratios))
        witness = (flat // p, flat % p)
        min_ratio = float(ratios.min())
        holds = bool(min_ratio >= float(claimed) - 1e-12)
        all_positive = bool((k4 > 0).all())

    return MinorizationReport(
        holds=holds,
        min_ratio=min_ratio,
        claimed=claimed,
        witness=None if holds else witness,
        all_positive=all_positive,
        exact=exact,
    )


@dataclass(frozen=True)
class BoundReport:
    """All bounds for one modulus, measured and closed-form side by side."""

    p: int
    epsilon: float
    lambda1: float
    lambda_min: float
    alpha_star: float
    comparison_A: float
    comparison_alpha1_upper: float
    v: float
    cycle_alpha_min_lower: float
    closed_form_A: float
    closed_form_v: float
    closed_alpha1_upper: float
    closed_alpha_min_lower: float
    coupling_n: int
    coupling_tau: int
    closed_form_n: int
    tau_measured: int | None

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "lambda1": self.lambda1,
            "lambda_min": self.lambda_min,
            "alpha_star": self.alpha_star,
            "comparison_A": self.comparison_A,
            "v": self.v,
            "alpha1_upper_closed": self.closed_alpha1_upper,
            "alpha_min_lower_closed": self.closed_alpha_min_lower,
            "coupling_n": self.coupling_n,
            "coupling_tau": self.coupling_tau,
            "tau_measured": self.tau_measured,
        }


def bound_report(
    modulus: PrimeModulus,
    epsilon: float = DEFAULT_EPSILON,
    measure_mixing: bool = True,
) -> BoundReport:
    """Full bound pipeline for one modulus.

    Builds the walk kernel, computes its spectrum, evaluates the path and
    cycle bounds with the default constructions, the closed forms, the
    coupling bound, and (optionally) the measured mixing time.
    """
    tensor = StructureTensor(modulus)
    kernel = build_kernel(tensor)
    pi = stationary(modulus)
    spectral = spectrum(kernel, pi)
    comp = comparison_bound(
        kernel, pi, equilibrium_kernel(modulus), pi, default_paths(modulus)
    )
    cyc = odd_cycle_bound(kernel, pi, default_cycles(modulus))
    closed = closed_form_bounds(modulus)
    coup = coupling_bound(modulus, epsilon)
    tau = None
    if measure_mixing:
        # asking for the measurement is the explicit start-gate override
        tau = mixing_time(kernel, epsilon, starts=range(modulus.p)).tau
    return BoundReport(
        p=modulus.p,
        epsilon=epsilon,
        lambda1=spectral.lambda1,
        lambda_min=spectral.lambda_min,
        alpha_star=spectral.alpha_star,
        comparison_A=comp.A,
        comparison_alpha1_upper=comp.alpha_upper(0.0),
        v=cyc.v,
        cycle_alpha_min_lower=cyc.alpha_min_lower,
        closed_form_A=closed.A,
        closed_form_v=closed.v,
        closed_alpha1_upper=closed.alpha1_upper,
        closed_alpha_min_lower=closed.alpha_min_lower,
        coupling_n=coup.n,
        coupling_tau=coup.tau_bound,
        closed_form_n=coup.closed_form_n,
        tau_measured=tau,
    )
