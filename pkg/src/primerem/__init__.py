"""Prime-counting remainder P(x) = pi(x) - li(x) and its integrals."""
from .errors import (
    ChecksumError,
    ConfigError,
    DomainError,
    PrimeremError,
    RangeError,
    SingularityError,
)
from .integrals import (
    Delta,
    IntegralValue,
    RemainderIntegrals,
    TailBound,
    calibrate_tail_constant,
    t_of_delta,
    tail_bound,
)
from .nsolve import A_CONST, NEstimate, NSolver, littlewood_scan, mean_value_check, target_value
from .primes import PrimeCheckpoint, PrimeEngine, lucy_hedgehog, sieve_segment
from .special import li, li_antiderivative, weight_antiderivative

__version__ = "0.1.0"
