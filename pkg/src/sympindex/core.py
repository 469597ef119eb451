"""Standard symplectic structures and determinant-based circle maps.

Conventions (fixed once for the whole package): the basis is ordered
``{e_1..e_n, f_1..f_n}`` so that::

    Omega0 = [[0,  Id],
              [-Id, 0]]          J0 = [[0, -Id],
                                       [Id,  0]]

A real 2n x 2n matrix is symplectic when ``A.T @ Omega0 @ A == Omega0``,
and C-linear (commutes with J0) exactly when it has the block shape
``[[B, -C], [C, B]]``; its complex determinant is ``det(B + iC)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ContractError, DimensionError
from .tolerances import DEFAULT_TOL, ToleranceProfile

__all__ = [
    "omega_matrix",
    "j_matrix",
    "is_symplectic",
    "SympMatrix",
    "as_array",
    "polar_decompose",
    "complex_det",
    "rho_polar",
    "rho_hat",
    "direct_sum",
    "direct_sum_many",
    "random_symplectic",
    "normalize_unit",
]

_OMEGA_CACHE: dict[int, np.ndarray] = {}
_J_CACHE: dict[int, np.ndarray] = {}


def omega_matrix(n: int) -> np.ndarray:
    """The standard symplectic form Omega0 on R^{2n} (read-only view)."""
    if n not in _OMEGA_CACHE:
        om = np.zeros((2 * n, 2 * n))
        om[:n, n:] = np.eye(n)
        om[n:, :n] = -np.eye(n)
        om.setflags(write=False)
        _OMEGA_CACHE[n] = om
    return _OMEGA_CACHE[n]


def j_matrix(n: int) -> np.ndarray:
    """The standard compatible complex structure J0 = -Omega0 (read-only)."""
    if n not in _J_CACHE:
        jm = -omega_matrix(n)
        jm.setflags(write=False)
        _J_CACHE[n] = jm
    return _J_CACHE[n]


def _check_even_square(M: np.ndarray) -> int:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2 != 0:
        raise DimensionError(f"matrix dimension {M.shape[0]} is odd")
    return M.shape[0] // 2


def symplectic_residual(M: np.ndarray) -> float:
    """Relative Frobenius residual of the symplectic identity."""
    n = _check_even_square(M)
    om = omega_matrix(n)
    return float(np.linalg.norm(M.T @ om @ M - om) / (1.0 + np.linalg.norm(M) ** 2))


def is_symplectic(M: np.ndarray, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    """True iff ``M.T @ Omega0 @ M = Omega0`` within ``tol.tol_symp`` (relative)."""
    return symplectic_residual(np.asarray(M, dtype=float)) <= tol.tol_symp


@dataclass(frozen=True)
class SympMatrix:
    """A real 2n x 2n matrix certified symplectic at construction."""

    entries: np.ndarray
    n: int

    def __init__(self, entries, tol: ToleranceProfile = DEFAULT_TOL):
        a = np.array(entries, dtype=float)
        n = _check_even_square(a)
        if not is_symplectic(a, tol):
            raise ContractError(
                f"matrix is not symplectic (residual {symplectic_residual(a):.3e})"
            )
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "n", n)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    @property
    def dim(self) -> int:
        return 2 * self.n


def as_array(A) -> np.ndarray:
    """Accept SympMatrix or ndarray-like; return a float ndarray."""
    if isinstance(A, SympMatrix):
        return np.asarray(A.entries)
    return np.asarray(A, dtype=float)


def polar_decompose(A, tol: ToleranceProfile = DEFAULT_TOL):
    """Unique polar factors ``A = O @ P`` of a symplectic matrix.

    O is orthogonal symplectic (hence unitary), P is symmetric positive
    definite symplectic with ``P @ P = A.T @ A``.  Computed from the
    singular value decomposition, which keeps the error of O proportional
    to cond(A) rather than cond(A)^2.
    """
    a = as_array(A)
    if not is_symplectic(a, tol):
        raise ContractError("polar_decompose requires a symplectic matrix")
    u, s, vt = np.linalg.svd(a)
    if np.min(s) <= 0:
        raise ContractError("A is singular")
    O = u @ vt
    P = vt.T @ (s[:, None] * vt)
    return O, P


def _complex_blocks(O: np.ndarray):
    n = _check_even_square(O)
    B = O[:n, :n]
    C = O[n:, :n]
    return B, C


def complex_det(O, tol: ToleranceProfile = DEFAULT_TOL) -> complex:
    """det(B + iC) for a C-linear matrix O = [[B,-C],[C,B]]."""
    o = as_array(O)
    n = _check_even_square(o)
    jm = j_matrix(n)
    comm = np.linalg.norm(o @ jm - jm @ o) / (1.0 + np.linalg.norm(o))
    if comm > max(tol.tol_symp, 1e-8):
        raise ContractError(f"matrix does not commute with J0 (residual {comm:.3e})")
    B, C = _complex_blocks(o)
    return complex(np.linalg.det(B + 1j * C))


def normalize_unit(z: complex) -> complex:
    """Project a nonzero complex number onto the unit circle."""
    m = abs(z)
    if m == 0:
        raise ContractError("cannot normalize zero to the unit circle")
    return z / m


def rho_polar(A, tol: ToleranceProfile = DEFAULT_TOL) -> complex:
    """Circle map det_C of the unitary polar factor of A."""
    O, _ = polar_decompose(A, tol)
    # the polar factor commutes with J0 exactly; project out rounding noise
    jm = j_matrix(O.shape[0] // 2)
    # the commutator residual grows like eps * cond(A)^2 through the
    # eigendecomposition; the check only needs to catch structural errors
    comm = np.linalg.norm(O @ jm - jm @ O) / (1.0 + np.linalg.norm(O))
    if comm > 1e-3:
        raise ContractError(
            f"polar factor does not commute with J0 (residual {comm:.3e})")
    return normalize_unit(complex_det(0.5 * (O - jm @ O @ jm), tol))


def rho_hat(A, tol: ToleranceProfile = DEFAULT_TOL) -> complex:
    """Normalized complex determinant of the C-linear part of A.

    C_g = (g - J0 g J0)/2 is the C-linear part of g and is invertible for
    every symplectic g; rho_hat(g) = det_C(C_g) / |det_C(C_g)|.
    """
    a = as_array(A)
    n = _check_even_square(a)
    if not is_symplectic(a, tol):
        raise ContractError("rho_hat requires a symplectic matrix")
    jm = j_matrix(n)
    cg = 0.5 * (a - jm @ a @ jm)
    B, C = _complex_blocks(cg)
    d = complex(np.linalg.det(B + 1j * C))
    return normalize_unit(d)


def _interleave_indices(sizes_n: list[int]) -> list[np.ndarray]:
    """Index maps placing each summand's {e..,f..} block into the joint basis."""
    total = sum(sizes_n)
    out = []
    offset = 0
    for m in sizes_n:
        idx = np.concatenate([np.arange(offset, offset + m),
                              np.arange(total + offset, total + offset + m)])
        out.append(idx)
        offset += m
    return out


def direct_sum_many(mats: list[np.ndarray]) -> np.ndarray:
    """Symplectic direct sum with the interleaved {e',e'',f',f''} layout."""
    arrs = [as_array(m) for m in mats]
    sizes = [_check_even_square(a) for a in arrs]
    total = sum(sizes)
    out = np.zeros((2 * total, 2 * total))
    for a, idx in zip(arrs, _interleave_indices(sizes)):
        out[np.ix_(idx, idx)] = a
    return out


def direct_sum(A, B) -> np.ndarray:
    """Symplectic direct sum of two symplectic matrices."""
    return direct_sum_many([A, B])


def random_symplectic(n: int, seed: int, scale: float = 0.5,
                      max_cond: float | None = None) -> np.ndarray:
    """Deterministic random symplectic matrix: product of 3-6 exp(J0 S_i).

    With ``max_cond`` set, redraws until the condition number is below it
    (used to produce well-conditioned conjugators for normal-form tests).
    """
    if n < 1:
        raise DimensionError("n must be >= 1")
    rng = np.random.default_rng(seed)
    jm = j_matrix(n)
    for _ in range(64):
        k = int(rng.integers(3, 7))
        A = np.eye(2 * n)
        for _ in range(k):
            S = rng.uniform(-scale, scale, size=(2 * n, 2 * n))
            S = 0.5 * (S + S.T)
            A = A @ sla.expm(jm @ S)
        if max_cond is None or np.linalg.cond(A) < max_cond:
            return A
    raise ContractError("could not draw a symplectic matrix under the condition cap")
