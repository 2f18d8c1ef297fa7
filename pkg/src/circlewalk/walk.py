"""The circle-generated random walk as a Markov chain on circle indices.

The kernel of the walk generated by C_m sends circle i to circle j with
probability n_im^j. It is ergodic and reversible with respect to the
measure that weights each circle by its point count, so iterating from any
start converges to that measure; mixing is measured in total variation
against the worst starting circle. A seeded plane simulator provides the
Monte Carlo counterpart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .circles import StructureTensor, circle_points, quadrance
from .modular import PrimeModulus

DEFAULT_EPSILON = 1 / (2 * math.e)

# Full-matrix mixing measurement is O(p^3) per step; above this, callers
# must pass an explicit start list.
MIXING_START_GATE = 499


class ZeroGenerator(ValueError):
    """The walk generated by C_0 never moves."""


class BadEpsilon(ValueError):
    """Total-variation threshold outside the usable range."""


class LengthMismatch(ValueError):
    """Distributions over state spaces of different sizes."""


class NotMixed(RuntimeError):
    """Mixing threshold not reached within the step budget."""

    def __init__(self, message: str, tv_curve: tuple[float, ...],
                 curve_starts: tuple[int, ...]):
        super().__init__(message)
        self.tv_curve = tv_curve
        self.curve_starts = curve_starts


class Distribution:
    """Probability vector over circle indices, exact or float flavored.

    Exact instances hold Fractions summing to 1 exactly; float instances
    hold float64 weights summing to 1 within 1e-12. All weights must be
    nonnegative.
    """

    __slots__ = ("weights", "exact")

    def __init__(self, weights, exact: bool):
        weights = tuple(weights)
        if exact:
            weights = tuple(Fraction(w) for w in weights)
            if any(w < 0 for w in weights):
                raise ValueError("negative weight")
            if sum(weights) != 1:
                raise ValueError("exact weights must sum to 1")
        else:
            weights = tuple(float(w) for w in weights)
            if any(w < 0 for w in weights):
                raise ValueError("negative weight")
            if abs(sum(weights) - 1.0) > 1e-12:
                raise ValueError("float weights must sum to 1 within 1e-12")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "exact", exact)

    def __setattr__(self, name, value):
        raise AttributeError("Distribution is immutable")

    def __len__(self) -> int:
        return len(self.weights)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Distribution)
            and self.exact == other.exact
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.exact, self.weights))

    def __repr__(self) -> str:
        flavor = "exact" if self.exact else "float"
        return f"Distribution({flavor}, n={len(self.weights)})"

    @classmethod
    def exact_weights(cls, weights) -> "Distribution":
        return cls(weights, exact=True)

    @classmethod
    def float_weights(cls, weights) -> "Distribution":
        return cls(weights, exact=False)

    @classmethod
    def point_mass(cls, n: int, i: int) -> "Distribution":
        if not 0 <= i < n:
            raise IndexError(f"state {i} out of range [0, {n})")
        return cls([Fraction(x == i) for x in range(n)], exact=True)

    def to_array(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights], dtype=np.float64)


class StochasticKernel:
    """Row-stochastic matrix stored as integer numerators over a common
    denominator, with an eagerly built float64 projection.

    Exactness of row sums is checked at construction.
    """

    __slots__ = ("p", "scaled", "denominator", "generator", "matrix")

    def __init__(self, scaled: np.ndarray, denominator: int,
                 generator: int | None = None):
        scaled = np.asarray(scaled)
        if scaled.ndim != 2 or scaled.shape[0] != scaled.shape[1]:
            raise ValueError("kernel must be square")
        if not np.issubdtype(scaled.dtype, np.integer):
            raise ValueError("scaled entries must be integers")
        scaled = scaled.astype(np.int64)
        if (scaled < 0).any():
            raise ValueError("negative kernel entry")
        if denominator <= 0:
            raise ValueError("denominator must be positive")
        bad = scaled.sum(axis=1) != denominator
        if bad.any():
            raise ValueError(f"row {int(np.argmax(bad))} does not sum to 1")
        scaled.setflags(write=False)
        matrix = scaled.astype(np.float64) / denominator
        matrix.setflags(write=False)
        object.__setattr__(self, "p", scaled.shape[0])
        object.__setattr__(self, "scaled", scaled)
        object.__setattr__(self, "denominator", denominator)
        object.__setattr__(self, "generator", generator)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("StochasticKernel is immutable")

    def exact(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.scaled[i, j]), self.denominator)

    def __repr__(self) -> str:
        return f"StochasticKernel(p={self.p}, generator={self.generator})"


def build_kernel(tensor: StructureTensor, m: int = 1) -> StochasticKernel:
    """Kernel of the C_m walk: entry (i, j) is n_im^j."""
    p = tensor.p
    if not 0 <= m < p:
        raise IndexError(f"generator {m} out of range [0, {p})")
    if m == 0:
        raise ZeroGenerator("C_0 steps are stationary; the walk never mixes")
    i = np.arange(p, dtype=np.int64).reshape(p, 1)
    j = np.arange(p, dtype=np.int64).reshape(1, p)
    v = (i * m - (j - i - m) ** 2 * tensor.modulus._inv4) % p
    scaled = np.where(tensor.modulus.residue_table[v], 2, 0)
    scaled[v == 0] = 1
    scaled[0, :] = 0
    scaled[0, m] = p + 1
    return StochasticKernel(scaled, p + 1, generator=m)


def stationary(modulus: PrimeModulus) -> Distribution:
    """Invariant law of every circle walk: each circle weighted by its size.

    The null circle carries 1/p^2 and each of the other p - 1 circles
    carries (p+1)/p^2.
    """
    p = modulus.p
    w = [Fraction(1, p * p)] + [Fraction(p + 1, p * p)] * (p - 1)
    return Distribution.exact_weights(w)


@dataclass(frozen=True)
class BalanceCheck:
    """Result of an exact detailed-balance check, with first violation."""

    ok: bool
    witness: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


def detailed_balance(kernel: StochasticKernel, dist: Distribution) -> BalanceCheck:
    """Exact check of pi(x) K(x, y) == pi(y) K(y, x) for all pairs."""
    if not dist.exact:
        raise ValueError("detailed balance requires an exact distribution")
    if len(dist) != kernel.p:
        raise LengthMismatch(f"{len(dist)} weights vs {kernel.p} states")
    w = dist.weights
    e = kernel.scaled
    for x in range(kernel.p):
        for y in range(x + 1, kernel.p):
            lhs = w[x].numerator * int(e[x, y]) * w[y].denominator
            rhs = w[y].numerator * int(e[y, x]) * w[x].denominator
            if lhs != rhs:
                return BalanceCheck(False, (x, y))
    return BalanceCheck(True)


def tv_distance(mu: Distribution, nu: Distribution):
    """Total variation: half the L1 distance. Exact when both inputs are."""
    if len(mu) != len(nu):
        raise LengthMismatch(f"{len(mu)} vs {len(nu)} states")
    if mu.exact and nu.exact:
        return sum(abs(a - b) for a, b in zip(mu.weights, nu.weights)) / 2
    return float(0.5 * np.abs(mu.to_array() - nu.to_array()).sum())


def iterate(kernel: StochasticKernel, start: Distribution, t: int) -> Distribution:
    """Law of the walk after t steps from ``start``, in float64."""
    if t < 0:
        raise ValueError("step count must be nonnegative")
    if len(start) != kernel.p:
        raise LengthMismatch(f"{len(start)} weights vs {kernel.p} states")
    v = start.to_array()
    for _ in range(t):
        v = v @ kernel.matrix
    return Distribution.float_weights(v)


@dataclass(frozen=True)
class MixingReport:
    """Worst-start mixing measurement: threshold, crossing time, TV curve.

    ``tv_curve[t]`` is the worst total variation to the invariant law over
    the measured starts after t steps; ``curve_starts[t]`` is the circle
    attaining it (smallest index on ties). ``worst_start`` is the circle
    that stayed above the threshold longest.
    """

    epsilon: float
    tau: int
    tv_curve: tuple[float, ...]
    curve_starts: tuple[int, ...]
    worst_start: int

    def __post_init__(self):
        curve = self.tv_curve
        if len(curve) != self.tau + 1:
            raise ValueError("curve must cover steps 0..tau")
        for a, b in zip(curve, curve[1:]):
            if b > a + 1e-12:
                raise ValueError("worst-case TV curve must be non-increasing")
        if curve[self.tau] > self.epsilon:
            raise ValueError("curve does not cross the threshold at tau")
        if self.tau > 0 and curve[self.tau - 1] <= self.epsilon:
            raise ValueError("threshold already met before tau")


def _default_max_steps(p: int, epsilon: float) -> int:
    from .bounds import smallest_contraction_power  # deferred: module cycle

    return 10 * 4 * smallest_contraction_power(p, epsilon)


def mixing_time(
    kernel: StochasticKernel,
    epsilon: float = DEFAULT_EPSILON,
    max_steps: int | None = None,
    starts=None,
) -> MixingReport:
    """First step at which every measured start is within ``epsilon`` of
    the invariant law in total variation.

    All starts are iterated simultaneously as rows of one matrix. With the
    default start list (every circle) this is the worst-case mixing time.
    """
    if not 0 < epsilon <= 1:
        raise BadEpsilon(f"epsilon must be in (0, 1], got {epsilon}")
    p = kernel.p
    if starts is None:
        if p > MIXING_START_GATE:
            raise ValueError(
                f"p={p} exceeds the all-starts gate {MIXING_START_GATE}; "
                "pass an explicit start list"
            )
        starts = range(p)
    starts = list(starts)
    if max_steps is None:
        # budget for a tighter threshold is enough for a looser one
        max_steps = _default_max_steps(p, min(epsilon, DEFAULT_EPSILON))

    pi = stationary_array(p)
    rows = np.zeros((len(starts), p))
    for r, s in enumerate(starts):
        rows[r, s] = 1.0

    curve: list[float] = []
    curve_starts: list[int] = []
    for t in range(max_steps + 1):
        tv = 0.5 * np.abs(rows - pi).sum(axis=1)
        arg = int(np.argmax(tv))
        curve.append(float(tv[arg]))
        curve_starts.append(int(starts[arg]))
        if curve[-1] <= epsilon:
            worst = curve_starts[-2] if t > 0 else curve_starts[0]
            return MixingReport(
                epsilon, t, tuple(curve), tuple(curve_starts), worst
            )
        rows = rows @ kernel.matrix
    raise NotMixed(
        f"worst TV still {curve[-1]:.3e} > {epsilon} after {max_steps} steps",
        tuple(curve),
        tuple(curve_starts),
    )


def stationary_array(p: int) -> np.ndarray:
    """Float projection of the invariant law for state count p."""
    pi = np.full(p, (p + 1) / p**2)
    pi[0] = 1 / p**2
    return pi


def boost_epsilon(tau_base: int, epsilon: float) -> int:
    """Step budget at threshold ``epsilon`` from the budget at 1/(2e).

    One crossing at 1/(2e) shrinks TV geometrically, so tau multiplies by
    ceil(ln(1/epsilon)). Thresholds at or above 1/(2e) need no boost.
    """
    if not 0 < epsilon < 1:
        raise BadEpsilon(f"epsilon must be in (0, 1), got {epsilon}")
    if tau_base < 0:
        raise ValueError("tau_base must be nonnegative")
    if epsilon >= DEFAULT_EPSILON:
        return tau_base
    return tau_base * math.ceil(math.log(1 / epsilon))


@dataclass(frozen=True)
class WalkTrace:
    """One realized plane walk: positions visited and their quadrances."""

    seed: int
    positions: tuple[tuple[int, int], ...]
    quadrances: tuple[int, ...]


class SimulationResult:
    """Empirical output of seeded plane walks started at the origin."""

    __slots__ = (
        "p", "steps", "trials", "seed",
        "quadrance_counts", "plane_counts", "empirical", "trace",
    )

    def __init__(self, p, steps, trials, seed, quadrance_counts, plane_counts,
                 empirical, trace):
        self.p = p
        self.steps = steps
        self.trials = trials
        self.seed = seed
        self.quadrance_counts = quadrance_counts
        self.plane_counts = plane_counts
        self.empirical = empirical
        self.trace = trace


def simulate(
    modulus: PrimeModulus, steps: int, trials: int, seed: int
) -> SimulationResult:
    """Run independent C_1 walks on the plane and tally final quadrances.

    Each step adds a uniformly chosen point of C_1. Draws are consumed
    trial-major then step-minor from one generator keyed by ``seed``, so
    identical arguments reproduce identical counts and traces.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if trials < 1:
        raise ValueError("trials must be positive")
    p = modulus.p
    pts = np.asarray(circle_points(modulus, 1), dtype=np.int64)

    rng = np.random.default_rng(seed)
    idx = rng.integers(0, pts.shape[0], size=(trials, steps))
    if steps > 0:
        xs = np.cumsum(pts[idx, 0], axis=1) % p
        ys = np.cumsum(pts[idx, 1], axis=1) % p
        fx, fy = xs[:, -1], ys[:, -1]
    else:
        xs = np.zeros((trials, 0), dtype=np.int64)
        ys = np.zeros((trials, 0), dtype=np.int64)
        fx = np.zeros(trials, dtype=np.int64)
        fy = np.zeros(trials, dtype=np.int64)

    finals = (fx * fx + fy * fy) % p
    quadrance_counts = np.bincount(finals, minlength=p)
    plane_counts = np.bincount(fx * p + fy, minlength=p * p).reshape(p, p)
    empirical = Distribution.float_weights(quadrance_counts / trials)

    positions = [(0, 0)] + [(int(xs[0, t]), int(ys[0, t])) for t in range(steps)]
    trace = WalkTrace(
        seed=seed,
        positions=tuple(positions),
        quadrances=tuple(quadrance(modulus, x, y) for x, y in positions),
    )
    return SimulationResult(
        p, steps, trials, seed, quadrance_counts, plane_counts, empirical, trace
    )
