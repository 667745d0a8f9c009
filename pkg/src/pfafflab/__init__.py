"""Distance geometry lab for curves cut out by chain-defined functions."""

from .errors import (
    BracketError,
    ConfigurationError,
    ConvergenceError,
    DegenerateTripleError,
    DomainError,
    GraphConditionError,
    IdentityViolation,
    InconclusiveError,
    InconsistencyError,
    ParameterError,
    PathError,
    PfaffLabError,
    PreconditionError,
    SeedError,
    ToleranceError,
    UndefinedInputError,
    WindowError,
)
from .poly import Polynomial
from .pfaffian import (
    Box,
    Format,
    PfaffianChain,
    PfaffianFunction,
    builtin_chain,
    chain_values,
    component_bound,
    concat_chains,
    parse_function,
    pfaff_eval,
    pfaff_gradient,
    serialize_function,
    with_ode_anchor,
)

__version__ = "0.1.0"
