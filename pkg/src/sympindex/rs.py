"""Crossing-form (Robbin-Salamon style) index for symplectic paths.

A crossing is a parameter where 1 is an eigenvalue of psi_t; it carries the
quadratic form Gamma = generator restricted to ker(psi_t - Id).  The index
is the signature sum with half weight at the global endpoints.  Exponential
segments with small generators and shears are scored by closed forms;
catenations are scored additively; everything else goes through a sigma_min
crossing scan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IrregularCrossingError
from .halfint import HalfInt
from .lagrangian import (CrossingReport, _scan_crossings, _signature,
                         lagrangian_rs_index, vertical_frame)
from .paths import (CatPath, ExpPath, PathSpec, ShearPath, evaluate_array,
                    generator)
from .tolerances import DEFAULT_TOL, ToleranceProfile

__all__ = ["RSResult", "rs_index", "rs2_index"]


@dataclass(frozen=True)
class RSResult:
    value: HalfInt
    crossings: tuple          # CrossingReport, in parameter order
    trace: tuple              # (t, smin of psi_t - Id, kernel_dim flag)


def _sign_count(w: np.ndarray, tol_form: float) -> int:
    return int(np.sum(w > tol_form) - np.sum(w < -tol_form))


def _closed_form_exp(path: ExpPath, tol: ToleranceProfile):
    """1/2 Sign S when the only crossing of exp(t J0 S) is at t = 0."""
    radius = np.max(np.abs(np.linalg.eigvals(path._js))) * abs(path.duration)
    if radius >= 2.0 * np.pi - 1e-9:
        return None
    w = np.linalg.eigvalsh(path.s_matrix * path.duration)
    sig = _sign_count(w, tol.tol_form)
    kernel = np.eye(2 * path.n)
    report = CrossingReport(
        t=0.0, kernel_dim=2 * path.n, kernel_basis=kernel,
        gamma=path.s_matrix * path.duration, signature=sig,
        regular=bool(np.min(np.abs(w)) > tol.tol_form), weight=0.5)
    return RSResult(value=HalfInt(sig), crossings=(report,), trace=())


def _closed_form_shear(path: ShearPath, tol: ToleranceProfile):
    """1/2 Sign B(0) - 1/2 Sign B(1) for the shear [[Id, B(t)], [0, Id]]."""
    w0 = np.linalg.eigvalsh(path.b_at(0.0))
    w1 = np.linalg.eigvalsh(path.b_at(1.0))
    doubled = _sign_count(w0, tol.tol_form) - _sign_count(w1, tol.tol_form)
    return RSResult(value=HalfInt(doubled), crossings=(), trace=())


def _generic_rs(path: PathSpec, tol: ToleranceProfile,
                grid: int = 512) -> RSResult:
    dim = 2 * path.n
    eye = np.eye(dim)

    def smin(t: float) -> float:
        return float(np.linalg.svd(evaluate_array(path, t) - eye,
                                   compute_uv=False)[-1])

    def kernel_at(t: float) -> np.ndarray:
        u, s, vt = np.linalg.svd(evaluate_array(path, t) - eye)
        k = int(np.sum(s < np.sqrt(tol.tol_kernel)))
        return vt[dim - k:, :].T

    crossings, trace, all_plateau = _scan_crossings(
        smin, lambda t: kernel_at(t).shape[1], tol, grid)
    trace = tuple(trace)
    if all_plateau:
        return RSResult(value=HalfInt(0), crossings=(), trace=trace)

    doubled = 0
    reports = []
    for t_star in crossings:
        kernel = kernel_at(t_star)
        k = kernel.shape[1]
        if k == 0:
            continue
        s_t = generator(path, t_star).s_matrix
        gamma = kernel.T @ s_t @ kernel
        gamma = 0.5 * (gamma + gamma.T)
        sig, regular = _signature(gamma, tol.tol_form)
        if not regular:
            raise IrregularCrossingError(
                f"irregular crossing at t={t_star:.8g} "
                f"(kernel dimension {k})")
        weight = 0.5 if t_star in (0.0, 1.0) else 1.0
        reports.append(CrossingReport(
            t=float(t_star), kernel_dim=k, kernel_basis=kernel, gamma=gamma,
            signature=sig, regular=regular, weight=weight))
        doubled += sig if weight == 0.5 else 2 * sig
    return RSResult(value=HalfInt(doubled), crossings=tuple(reports),
                    trace=trace)


def rs_index(path: PathSpec, tol: ToleranceProfile = DEFAULT_TOL) -> RSResult:
    """Crossing-form index of a symplectic path against the identity."""
    if isinstance(path, CatPath):
        parts = [rs_index(p, tol) for p in path.parts]
        k = len(path.parts)
        value = sum((r.value for r in parts), HalfInt(0))
        reports = []
        for i, r in enumerate(parts):
            for c in r.crossings:
                reports.append(CrossingReport(
                    t=(i + c.t) / k, kernel_dim=c.kernel_dim,
                    kernel_basis=c.kernel_basis, gamma=c.gamma,
                    signature=c.signature, regular=c.regular,
                    weight=c.weight))
        return RSResult(value=value, crossings=tuple(reports), trace=())
    if isinstance(path, ExpPath):
        closed = _closed_form_exp(path, tol)
        if closed is not None:
            return closed
    if isinstance(path, ShearPath):
        return _closed_form_shear(path, tol)
    return _generic_rs(path, tol)


def rs2_index(path: PathSpec, tol: ToleranceProfile = DEFAULT_TOL) -> HalfInt:
    """Index of the evolved vertical Lagrangian t -> psi_t ({0} x R^n)."""
    v = vertical_frame(path.n)

    def frames(t: float):
        return evaluate_array(path, t) @ v.frame

    value, _, _ = lagrangian_rs_index(frames, v, tol)
    return value
