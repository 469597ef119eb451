"""Exception hierarchy for the symplectic index toolkit.

Every failure mode raised by the library derives from :class:`SympindexError`
so callers (and the CLI) can distinguish contract violations from genuine
bugs.  Parse-level problems in the CLI use plain ``ValueError``.
"""


class SympindexError(Exception):
    """Base class for all library errors."""

    code = "error"


class DimensionError(SympindexError):
    """Matrix dimensions are odd or inconsistent."""

    code = "dimension"


class ContractError(SympindexError):
    """An input violates a documented precondition (e.g. not symplectic)."""

    code = "contract"


class IllConditionedSpectrumError(SympindexError):
    """Eigenvalue clustering is ambiguous or structurally inconsistent."""

    code = "ill-conditioned-spectrum"


class NotAnEigenvalueError(SympindexError):
    """A requested eigenvalue is not in the spectrum within tolerance."""

    code = "not-an-eigenvalue"


class KreinDegenerateError(SympindexError):
    """The Krein form at a unit eigenvalue is numerically degenerate."""

    code = "krein-degenerate"


class ParameterError(SympindexError):
    """Invalid block or path parameters."""

    code = "parameter"


class NormalFormError(SympindexError):
    """Normal-form construction failed (residual too large or degenerate pivot)."""

    code = "normal-form"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PerturbationFailureError(SympindexError):
    """semisimple_perturb could not reach distinct eigenvalues after retries."""

    code = "perturbation-failure"


class AdmissibilityError(SympindexError):
    """Path endpoint has eigenvalue 1 (or endpoint sign is ambiguous)."""

    code = "admissibility"


class WindingResolutionError(SympindexError):
    """Adaptive phase unwrapping exceeded the refinement depth cap."""

    code = "non-resolvable-winding"


class InternalConsistencyError(SympindexError):
    """Independently computed values that must agree do not."""

    code = "internal-consistency"


class IrregularCrossingError(SympindexError):
    """A crossing form is degenerate on the kernel."""

    code = "irregular-crossing"


class UnsupportedStructureError(SympindexError):
    """Crossing structure (plateau transitions) outside the covered cases."""

    code = "unsupported-structure"


class NoCrossingError(SympindexError):
    """Crossing form requested at a parameter with trivial intersection."""

    code = "no-crossing"


class ConditioningError(SympindexError):
    """A supplementary space or solve is numerically unusable."""

    code = "conditioning"


class SamplingError(SympindexError):
    """Sampled path too coarse for in-group interpolation."""

    code = "sampling-too-coarse"
