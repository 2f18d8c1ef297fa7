"""Random walks on the circles of F_p^2: exact structure, mixing, bounds."""

from .modular import (
    NotASquare,
    NotPrime,
    PrimeModulus,
    Squareness,
    WrongResidueClass,
    inv_mod,
    is_square,
    make_modulus,
    primes_3_mod_4,
    sqrt_mod,
)
from .circles import (
    AxiomReport,
    StructureTensor,
    circle_points,
    circle_size,
    quadrance,
    structure_constant,
    structure_constant_bruteforce,
    triple_support,
    validate_axioms,
)
from .walk import (
    DEFAULT_EPSILON,
    BadEpsilon,
    Distribution,
    LengthMismatch,
    MixingReport,
    NotMixed,
    StochasticKernel,
    WalkTrace,
    ZeroGenerator,
    boost_epsilon,
    build_kernel,
    detailed_balance,
    iterate,
    mixing_time,
    simulate,
    stationary,
    tv_distance,
)
from .bounds import (
    BoundReport,
    ComparisonBound,
    CouplingBound,
    EvenCycle,
    InvalidCycleEdge,
    InvalidPathEdge,
    MinorizationReport,
    MissingPath,
    NoOddCycle,
    NotReversible,
    SpectrumReport,
    bound_report,
    closed_form_bounds,
    comparison_bound,
    coupling_bound,
    default_cycles,
    default_paths,
    dirichlet_form,
    equilibrium_kernel,
    minorization_check,
    odd_cycle_bound,
    spectral_tv_bound,
    spectrum,
)

__version__ = "0.1.0"
