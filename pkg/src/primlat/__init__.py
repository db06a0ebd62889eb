"""primlat: averages of bounded completely multiplicative functions over
lattice and primitive lattice points, with exact transfer identities,
closed-form limit constants, Gaussian-integer evaluation, and orbit
averages along Omega(m**2 + n**2)."""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    ConfigError,
    DomainError,
    EmptyDomainError,
    FormPositivityError,
    ParameterError,
    PrimlatError,
    RangeError,
    SingularityError,
    TailModeError,
)
from .sieve import PrimeClass, SieveTables, build_sieve, factorize, liouville, prime_class
from .multfunc import (
    MultiplicativeSpec,
    by_class_spec,
    constant_spec,
    evaluate,
    evaluate_exact,
    evaluate_power,
    liouville_spec,
    one_spec,
    power_spec,
    prime_value,
    product_spec,
    seeded_phase_spec,
    seeded_sign_spec,
    split_agree_spec,
)
from .lattice import (
    ALL_POINTS,
    PRIMITIVE,
    AverageReport,
    GridMode,
    HomogeneousForm,
    SUM_OF_SQUARES,
    count_primitive,
    fixed_gcd,
    form_value_grid,
    grid_average,
    k_free_gcd,
    layer_decomposition,
    mobius_layer_sum,
    sweep,
    truncated_full_transform,
    truncated_primitive_transform,
)
from .predict import (
    PredictionResult,
    consistency_check,
    coprime_two_squares_constant,
    dirichlet_series,
    euler_product,
    full_constant,
    full_two_squares_constant,
    gaussian_coprime_factor,
    primitive_constant,
    zeta,
)
from .gaussian import (
    GaussFactorization,
    GaussInt,
    GaussianMultSpec,
    eval_gauss,
    factor_gaussian,
    norm,
    sqrt_minus_one,
)
from .ergodic import (
    CircleRotation,
    CyclicRotation,
    CyclicTable,
    MultiplicativeFlow,
    TrigPolynomial,
    flow_pair_average,
    integral,
    omega_orbit_average,
)
from .multilinear import (
    LinearForm,
    MultilinearProblem,
    conjugate_paired_average,
    convergence_probe,
    multilinear_average,
    multilinear_average_exact,
    multilinear_constants,
    primitive_transfer_sum,
)
