"""Exception types raised by the order engines."""


class SeqPrecError(Exception):
    """Base class for all errors raised by :mod:`seqprec`."""


class MalformedParameter(SeqPrecError, ValueError):
    """A distribution or run configuration is not well formed."""


class HazardUndefined(SeqPrecError, ValueError):
    """Hazard requested at a point where the survival function vanishes."""


class MethodUnsupported(SeqPrecError, ValueError):
    """The requested computation method does not apply to these variables."""


class DegenerateSupport(SeqPrecError, ValueError):
    """Both densities vanish on the whole evaluation grid."""


class NonConvergence(SeqPrecError, RuntimeError):
    """Quadrature error stayed above tolerance after the maximum refinement."""


class PreconditionNotEstablished(SeqPrecError, ValueError):
    """An audited claim's hypothesis could not be certified on the instance."""


class TooManyVariables(SeqPrecError, ValueError):
    """Permutation table requested for more variables than the configured cap."""
