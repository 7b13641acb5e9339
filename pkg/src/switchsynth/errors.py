"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`SwitchSynthError`; the CLI maps the four top-level families onto
exit codes.
"""


class SwitchSynthError(Exception):
    """Base class for all package errors."""


class InputError(SwitchSynthError, ValueError):
    """Malformed or inconsistent input."""


class CertificateError(SwitchSynthError):
    """A Lyapunov-like certificate could not be produced or is invalid."""


class SolverError(SwitchSynthError):
    """An optimization or extraction step failed."""


# certificates
class NotFullRank(CertificateError):
    pass


class LambdaOnBoundary(CertificateError):
    pass


class NumericalFailure(CertificateError):
    pass


class NotPositiveDefinite(CertificateError, ValueError):
    pass


class DimensionMismatch(InputError):
    pass


# digraph
class MissingCertificate(CertificateError):
    pass


class UnknownVertexInEdge(InputError):
    pass


class NoSuchEdge(InputError, KeyError):
    pass


class GraphTooLarge(InputError):
    pass


# walks
class EmptyWalk(InputError):
    pass


class NotClosed(InputError):
    pass


class NotCircuit(InputError):
    pass


class NotContractive(InputError):
    pass


class EndpointMismatch(InputError):
    pass


class InadmissibleWalk(InputError):
    pass


# circuit synthesis
class Infeasible(SolverError):
    pass


class SolverFailure(SolverError):
    pass


class Unbalanced(SolverError):
    pass


class EmptySupport(SolverError):
    pass


# randomized synthesis
class NotNicelyConnected(InputError):
    pass


class DeadEnd(SolverError):
    pass


class InvalidModel(InputError):
    pass


class InfeasibleDegree(InputError):
    pass


class UnstableVertexInCycle(InputError):
    pass


class CycleLengthUnavailable(SolverError):
    pass
