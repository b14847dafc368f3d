"""Identification in the limit from informants: learners, transforms and monitors."""
from .core import (
    ContradictionError,
    InfoPair,
    Informant,
    Prefix,
    Schedule,
    ScheduleError,
    canonical_informant,
    consistent,
    pair_decode,
    pair_encode,
    scheduled_informant,
    sigma_canonicalize,
)
from .hypotheses import (
    BaseWithException,
    Cofinite,
    DoubledPair,
    Evens,
    EvensPlusOne,
    Finite,
    Graph,
    Hypothesis,
    Split,
    Uniform,
    exact,
    fresh_registry,
)
from .learners import Learner, PartialLearner, Trace, run_trace
from .monitors import EqOracle, Verdict, check_lim, check_restriction

__version__ = "0.1.0"
