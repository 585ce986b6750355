"""Stochastic precedence, sequential precedence and related pairwise orders.

The main entry points are re-exported here; see the submodules for details.
"""

from .applications import AllocationSpec, series_parallel_compare, sp_ratio
from .audit import AuditReport, FamilySpace, audit_claim, search_counterexample
from .config import Config
from .distributions import Distribution, blyth_triple, evaluate, make_distribution, quantile, sample
from .errors import (
    DegenerateSupport,
    HazardUndefined,
    MalformedParameter,
    MethodUnsupported,
    NonConvergence,
    PreconditionNotEstablished,
    SeqPrecError,
    TooManyVariables,
)
from .estimates import ProbEstimate
from .pairwise_orders import OrderVerdict, check_hr, check_lr, check_sp, check_st, sp_probability
from .rng import Rng
from .sequence_orders import (
    PermProbTable,
    SspReport,
    check_ssp,
    perm_probability,
    perm_table,
    transposition_compare,
)

__version__ = "0.1.0"
