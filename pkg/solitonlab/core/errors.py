"""Exception hierarchy. The CLI maps these onto exit codes (see main.py)."""


class SolitonLabError(Exception):
    pass


class ConfigurationError(SolitonLabError, ValueError):
    """Invalid grid, model parameters or run configuration."""


# --- numerical failures -------------------------------------------------------

class SolverError(SolitonLabError):
    pass


class NonConvergence(SolverError):
    pass


class CollapseToZero(SolverError):
    pass


class UnderResolved(SolverError):
    pass


class QuadratureError(SolverError):
    pass


class NewtonDivergence(SolverError):
    pass


class SingularJacobian(SolverError):
    pass


class NonFinite(SolverError):
    pass


class EigenNonConvergence(SolverError):
    pass


class DegenerateNormalization(SolverError):
    pass


class ConvexityViolation(SolverError):
    pass


class SeparationViolated(SolverError):
    pass


# --- persistence --------------------------------------------------------------

class CheckpointError(SolitonLabError):
    pass


class CorruptHeader(CheckpointError):
    pass


class TruncatedPayload(CheckpointError):
    pass


class UnsupportedVersion(CheckpointError):
    pass


class AcceptanceFailure(SolitonLabError):
    def __init__(self, failed: list[str]):
        super().__init__("acceptance checks failed: " + ", ".join(failed))
        self.failed = failed
