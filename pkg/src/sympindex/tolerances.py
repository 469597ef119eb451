"""Numerical tolerance profile shared by all modules."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ParameterError


@dataclass(frozen=True)
class ToleranceProfile:
    """Thresholds for the floating-point decisions made by the library.

    tol_symp    symplecticity residual (relative, Frobenius)
    tol_eig     eigenvalue clustering radius
    tol_kernel  singular-value threshold for kernel dimensions
    tol_form    nondegeneracy threshold for quadratic/crossing forms
    tol_nf      acceptable normal-form reconstruction residual
    max_refine  winding bisection depth cap
    """

    tol_symp: float = 1e-9
    tol_eig: float = 1e-7
    tol_kernel: float = 1e-8
    tol_form: float = 1e-8
    tol_nf: float = 1e-6
    max_refine: int = 40

    def __post_init__(self):
        for name in ("tol_symp", "tol_eig", "tol_kernel", "tol_form", "tol_nf"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be strictly positive")
        if self.max_refine <= 0:
            raise ParameterError("max_refine must be strictly positive")

    def with_overrides(self, **kwargs) -> "ToleranceProfile":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)


DEFAULT_TOL = ToleranceProfile()
