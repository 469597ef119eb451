"""Degree-based Conley-Zehnder index.

The index of an admissible path (psi(0) = Id, 1 not an eigenvalue of psi(1))
is the winding number of the squared rotation map along the path extended to
one of the two component representatives

    W+ = -Id          W- = diag(2, -1, ..., -1, 1/2, -1, ..., -1).

The winding over [0, 1] is sampled adaptively.  The extension's contribution
is computed three ways and cross-checked:

* for the spectral rotation map, analytically from the spectrum of a nearby
  semisimple matrix (each Krein-kappa unit eigenvalue pair at angle phi in
  (0, pi) contributes kappa*(pi - phi)/pi; other regimes contribute 0), plus
  a sampled bridge to the perturbed endpoint;
* for the polar and C-linear-part maps, whose values are not functions of the
  spectrum alone, by sampling an explicitly materialized extension: the
  bridge, a blockwise eigenvalue deformation in the normal-form basis, and a
  final unwinding of the conjugation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .core import (as_array, direct_sum_many, j_matrix, normalize_unit,
                   omega_matrix, rho_hat, rho_polar)
from .errors import (AdmissibilityError, ContractError,
                     IllConditionedSpectrumError, InternalConsistencyError,
                     KreinDegenerateError, ParameterError,
                     WindingResolutionError)
from .halfint import HalfInt
from .lagrangian import _golden_min
from .normal_form import NormalFormBlock, normal_form
from .normal_form import semisimple_perturb
from .paths import PathSpec, evaluate_array
from .spectral import rho
from .tolerances import DEFAULT_TOL, ToleranceProfile

__all__ = [
    "IndexResult",
    "ExtensionPlan",
    "winding",
    "extension_winding",
    "conley_zehnder",
    "cz_dim2_closed_form",
    "maslov_loop",
]


@dataclass(frozen=True)
class IndexResult:
    value: HalfInt
    winding_trace: tuple          # (t, unwrapped phase of rho^2) over [0, 1]
    extension_winding: float      # turns of rho^2 along the extension
    endpoint: str                 # "W+" or "W-"
    diagnostics: dict


@dataclass(frozen=True)
class ExtensionPlan:
    """Per-quadruple deformation records for the extension to W+/-."""

    records: tuple                # (regime, start parameter, krein, increment)
    endpoint: str

    @property
    def total_increment(self) -> float:
        return float(sum(r[3] for r in self.records))


# ---------------------------------------------------------------------------
# winding engine


def winding(f, max_refine: int = 40, coarse: int = 64, anchor_ts=None):
    """Total unwrapped phase change of a unit-circle map over [0,1], in turns.

    Adaptive bisection until every consecutive phase step is below pi/2;
    returns (turns, trace, max_depth) where trace is the ordered list of
    (t, cumulative phase in radians).  ``anchor_ts`` adds extra initial
    sample parameters so features invisible to the uniform grid (a full
    sweep between two equal values) still trigger refinement.
    """
    ts = [i / coarse for i in range(coarse + 1)]
    if anchor_ts:
        ts = sorted({round(min(max(float(t), 0.0), 1.0), 12) for t in ts}
                    | {round(min(max(float(t), 0.0), 1.0), 12)
                       for t in anchor_ts})
    zs = [normalize_unit(complex(f(t))) for t in ts]

    trace_t = [0.0]
    trace_phase = [0.0]
    max_depth = 0

    def rec(t0, z0, t1, z1, depth):
        nonlocal max_depth
        dphi = float(np.angle(z1 / z0))
        if abs(dphi) < 0.5 * np.pi:
            trace_t.append(t1)
            trace_phase.append(trace_phase[-1] + dphi)
            return
        if depth >= max_refine:
            raise WindingResolutionError(
                f"phase step {dphi:.3f} at t in [{t0:.6g},{t1:.6g}] "
                f"not resolved within depth {max_refine}")
        max_depth = max(max_depth, depth + 1)
        tm = 0.5 * (t0 + t1)
        zm = normalize_unit(complex(f(tm)))
        rec(t0, z0, tm, zm, depth + 1)
        rec(tm, zm, t1, z1, depth + 1)

    for i in range(len(ts) - 1):
        rec(ts[i], zs[i], ts[i + 1], zs[i + 1], 0)
    turns = trace_phase[-1] / (2.0 * np.pi)
    return turns, list(zip(trace_t, trace_phase)), max_depth


def _nudged(f, eps=1e-9):
    """Wrap a sampler so isolated Krein degeneracies are stepped over."""

    def g(t):
        try:
            return f(t)
        except KreinDegenerateError:
            s = t + eps if t < 0.5 else t - eps
            return f(s)

    return g


def _rho_robust(a: np.ndarray, tol: ToleranceProfile) -> complex:
    """rho with a tolerance cascade for continuously splitting clusters.

    rho is continuous in the matrix, so when a cluster gap lands inside the
    clustering ambiguity band the value is insensitive to how the cluster is
    resolved; rescaling tol_eig moves the band off the gap.
    """
    last = None
    for factor in (1.0, 0.05, 20.0, 0.0025, 400.0):
        try:
            return rho(a, tol.with_overrides(tol_eig=factor * tol.tol_eig))
        except IllConditionedSpectrumError as exc:
            last = exc
    raise last


# ---------------------------------------------------------------------------
# canonical extension of an endpoint to W+/-


def _unit_passage_times(sample, dim: int, grid: int = 256) -> list[float]:
    """Parameters where an eigenvalue of the sampled path passes +-1.

    The spectral rotation map is locally constant on hyperbolic stretches, so
    a full circle sweep between two passages is invisible to a uniform grid;
    the refined passage parameters anchor the winding sampler there.
    """
    eye = np.eye(dim)

    def dist(t: float) -> float:
        a = sample(t)
        s1 = np.linalg.svd(a - eye, compute_uv=False)[-1]
        s2 = np.linalg.svd(a + eye, compute_uv=False)[-1]
        return float(min(s1, s2))

    ts = np.linspace(0.0, 1.0, grid + 1)
    vals = [dist(t) for t in ts]
    out = []
    # a passage refines to a window boundary where the map is back at +-1;
    # geometric offsets on both sides guarantee a sample inside the window
    # (mid-sweep) whatever its width, down to ~1e-9
    offsets = [2.0 ** -k / grid for k in range(30)]
    for i in range(1, grid):
        if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]:
            t_star, _ = _golden_min(dist, float(ts[i - 1]), float(ts[i + 1]),
                                    width=1e-8)
            out.append(t_star)
            out.extend(t_star + d for d in offsets)
            out.extend(t_star - d for d in offsets)
    return [min(max(t, 0.0), 1.0) for t in out]


def _rot(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def _pair_block(lam_t):
    return np.diag([lam_t, 1.0 / lam_t])


def _quad_block(r, th):
    """4x4 block diag(r R(th), r^-1 R(th)) in the {e1,e2,f1,f2} layout."""
    out = np.zeros((4, 4))
    out[:2, :2] = r * _rot(th)
    out[2:, 2:] = _rot(th) / r
    return out


class _Extension:
    """Materialized deformation of a semisimple endpoint to W+/-."""

    def __init__(self, a_end: np.ndarray, tol: ToleranceProfile, seed: int):
        a_end = as_array(a_end)
        dim = a_end.shape[0]
        n = dim // 2
        det_gap = float(np.linalg.det(a_end - np.eye(dim)))
        if abs(det_gap) <= tol.tol_kernel:
            raise AdmissibilityError(
                f"|det(A - Id)| = {abs(det_gap):.3e} is below tol_kernel")
        self.endpoint = "W+" if det_gap > 0 else "W-"
        self.det_gap = det_gap

        eps = min(1e-6, 0.01 * abs(det_gap) ** (1.0 / dim))
        nf_tol = tol.with_overrides(tol_eig=max(1e-12, 2.5e-3 * eps))
        self.tol = nf_tol
        base_report = normal_form(a_end, tol)
        aprime = semisimple_perturb(a_end, eps=eps, seed=seed, tol=tol,
                                    report=base_report)
        report = normal_form(aprime, nf_tol)

        # classify the (all order-1) blocks of the perturbed endpoint
        unit, pos, neg, quad = [], [], [], []
        for i, b in enumerate(report.blocks):
            if b.case == "UnitNonRealOdd" and b.jordan_order == 1:
                unit.append(i)
            elif b.case == "OffCircleReal":
                (pos if b.lambda_param[0] > 0 else neg).append(i)
            elif b.case == "OffCircleComplex":
                quad.append(i)
            else:
                raise InternalConsistencyError(
                    f"perturbed endpoint has a non-semisimple block {b.case}")
        want_odd = self.endpoint == "W-"
        if (len(pos) % 2 == 1) != want_odd:
            raise InternalConsistencyError(
                "sign of det(A - Id) contradicts the positive-pair parity")

        records = []
        for i in unit:
            phi = report.blocks[i].lambda_param[0]
            kappa = 1 if phi > 0 else -1
            records.append(("UnitNonReal", phi, kappa,
                            kappa * (np.pi - abs(phi)) / np.pi))
        for i in pos:
            records.append(("RealPositive", report.blocks[i].lambda_param[0], 0, 0.0))
        for i in neg:
            records.append(("RealNegative", report.blocks[i].lambda_param[0], 0, 0.0))
        for i in quad:
            records.append(("OffCircleComplex",
                            complex(*report.blocks[i].lambda_param), 0, 0.0))
        self.plan = ExtensionPlan(records=tuple(records), endpoint=self.endpoint)

        # order the blocks: a surviving positive pair first (for W-), then
        # positive pairs two by two, then everything else
        order = []
        survivor = None
        if want_odd:
            survivor = pos.pop()
            order.append(survivor)
        order.extend(pos)
        order.extend(neg)
        order.extend(quad)
        order.extend(unit)

        sizes = [b.size // 2 for b in report.blocks]
        offsets = np.concatenate([[0], np.cumsum(sizes)])
        half = int(offsets[-1])
        perm = []
        for idx in order:
            perm.extend(range(offsets[idx], offsets[idx + 1]))
        perm = perm + [half + j for j in perm]
        self.k_perm = report.basis[:, perm]
        self.k_perm_inv = np.linalg.inv(self.k_perm)

        # blockwise deformers on [0, 1]
        deformers = []
        blocks = report.blocks
        i_pos = 0
        pending = None
        for idx in order:
            b = blocks[idx]
            if idx == survivor:
                lam = b.lambda_param[0]
                deformers.append(
                    (1, lambda t, lam=lam: _pair_block((1 - t) * lam + 2 * t)))
            elif b.case == "OffCircleReal" and b.lambda_param[0] > 0:
                if pending is None:
                    pending = b.lambda_param[0]
                else:
                    lam1, lam2 = pending, b.lambda_param[0]
                    pending = None

                    def pos_pair(t, lam1=lam1, lam2=lam2):
                        if t <= 0.5:
                            m = (1 - 2 * t) * lam2 + 2 * t * lam1
                            out = np.zeros((4, 4))
                            out[:2, :2] = np.diag([lam1, m])
                            out[2:, 2:] = np.diag([1 / lam1, 1 / m])
                            return out
                        s = 2 * t - 1
                        return _quad_block(1 + (lam1 - 1) * (1 - s), np.pi * s)

                    deformers.append((2, pos_pair))
            elif b.case == "OffCircleReal":
                lam = b.lambda_param[0]
                deformers.append(
                    (1, lambda t, lam=lam: _pair_block((1 - t) * lam - t)))
            elif b.case == "OffCircleComplex":
                r0, th0 = b.lambda_param
                deformers.append(
                    (2, lambda t, r0=r0, th0=th0: _quad_block(
                        1 + (r0 - 1) * (1 - t), th0 + (np.pi - th0) * t)))
            else:
                phi = b.lambda_param[0]
                target = np.pi if phi > 0 else -np.pi
                deformers.append(
                    (1, lambda t, phi=phi, target=target: _rot(
                        (1 - t) * phi + t * target)))
        if pending is not None:
            raise InternalConsistencyError("unpaired positive eigenvalue pair")
        self._deformers = deformers
        del i_pos

        # bridge log and final unwinding of the conjugation
        self.a_end = a_end
        self._bridge_log = sla.logm(np.linalg.solve(a_end, aprime)).real
        self.aprime = aprime
        self._w_matrix = self._deform(1.0)
        self._unwind = self._build_unwind(self.k_perm)

    def _deform(self, t: float) -> np.ndarray:
        return direct_sum_many([fn(t) for _, fn in self._deformers])

    @staticmethod
    def _build_unwind(k: np.ndarray):
        """Path K(t) from K to Id through the symplectic polar coordinates."""
        dim = k.shape[0]
        n = dim // 2
        w, v = np.linalg.eigh(k.T @ k)
        z = (v * np.log(w)) @ v.T / 2.0        # log of the positive factor
        o = k @ ((v * np.exp(-0.5 * np.log(w))) @ v.T)
        u = o[:n, :n] + 1j * o[n:, :n]
        wu, vu = np.linalg.eig(u)
        theta = np.angle(wu)

        def k_at(t: float) -> np.ndarray:
            ut = (vu * np.exp(1j * (1 - t) * theta)) @ np.linalg.inv(vu)
            ot = np.block([[ut.real, -ut.imag], [ut.imag, ut.real]])
            return ot @ sla.expm((1 - t) * z)

        return k_at

    def bridge_at(self, t: float) -> np.ndarray:
        return self.a_end @ sla.expm(t * self._bridge_log)

    def at(self, t: float) -> np.ndarray:
        """The full materialized extension on [0, 1]."""
        if t <= 1.0 / 3.0:
            return self.bridge_at(3.0 * t)
        if t <= 2.0 / 3.0:
            nt = self._deform(3.0 * t - 1.0)
            return self.k_perm @ nt @ self.k_perm_inv
        kt = self._unwind(3.0 * t - 2.0)
        return kt @ self._w_matrix @ np.linalg.solve(kt, np.eye(kt.shape[0]))


def extension_winding(A, tol: ToleranceProfile = DEFAULT_TOL, seed: int = 0):
    """Turns of rho^2 along the canonical extension of A to W+ or W-.

    Returns (turns, endpoint).  The value is the sampled bridge winding to a
    nearby semisimple matrix plus the analytic unit-spectrum sum.
    """
    ext = _Extension(as_array(A), tol, seed)
    f = _nudged(lambda t: _rho_robust(ext.bridge_at(t), ext.tol) ** 2)
    bridge_turns, _, _ = winding(f, tol.max_refine, coarse=16)
    return bridge_turns + ext.plan.total_increment, ext.endpoint


# ---------------------------------------------------------------------------
# the index


def _check_starts_at_identity(path: PathSpec, tol: ToleranceProfile):
    p0 = evaluate_array(path, 0.0)
    if np.linalg.norm(p0 - np.eye(p0.shape[0])) > 1e3 * tol.tol_symp:
        raise AdmissibilityError("path does not start at the identity")


def conley_zehnder(path: PathSpec, tol: ToleranceProfile = DEFAULT_TOL,
                   seed: int = 0) -> IndexResult:
    """Winding number of the squared rotation map along the extended path.

    Computed with the spectral rotation map, the polar-factor map and the
    C-linear-part map; the three integers must agree.
    """
    _check_starts_at_identity(path, tol)
    a_end = evaluate_array(path, 1.0)
    ext = _Extension(a_end, tol, seed)

    # main [0,1] windings for the three circle maps
    anchors = _unit_passage_times(lambda t: evaluate_array(path, t),
                                  a_end.shape[0])
    f_rho = _nudged(lambda t: _rho_robust(evaluate_array(path, t), tol) ** 2)
    w_rho, trace, depth = winding(f_rho, tol.max_refine, anchor_ts=anchors)
    w_polar, _, _ = winding(lambda t: rho_polar(evaluate_array(path, t), tol) ** 2,
                            tol.max_refine)
    w_hat, _, _ = winding(lambda t: rho_hat(evaluate_array(path, t), tol) ** 2,
                          tol.max_refine)

    # extension windings
    f_bridge = _nudged(lambda t: _rho_robust(ext.bridge_at(t), ext.tol) ** 2)
    e_rho, _, _ = winding(f_bridge, tol.max_refine, coarse=16)
    e_rho += ext.plan.total_increment
    e_polar, _, _ = winding(lambda t: rho_polar(ext.at(t), tol) ** 2,
                            tol.max_refine, coarse=96)
    e_hat, _, _ = winding(lambda t: rho_hat(ext.at(t), tol) ** 2,
                          tol.max_refine, coarse=96)

    totals = {"spectral": w_rho + e_rho, "polar": w_polar + e_polar,
              "clinear": w_hat + e_hat}
    rounded = {}
    for name, val in totals.items():
        r = int(round(val))
        if abs(val - r) > 0.1:
            raise InternalConsistencyError(
                f"{name} winding {val:.6f} is not within 0.1 of an integer")
        rounded[name] = r
    if len(set(rounded.values())) != 1:
        raise InternalConsistencyError(
            f"circle maps disagree on the index: {rounded}")

    value = rounded["spectral"]
    smin_end = float(np.linalg.svd(a_end - np.eye(a_end.shape[0]),
                                   compute_uv=False)[-1])
    return IndexResult(
        value=HalfInt.from_int(value),
        winding_trace=tuple(trace),
        extension_winding=float(e_rho),
        endpoint=ext.endpoint,
        diagnostics={
            "refinement_depth": depth,
            "det_gap": ext.det_gap,
            "smin_end": smin_end,
            "windings": totals,
        },
    )


def cz_dim2_closed_form(S, T: float) -> HalfInt:
    """Closed-form index of t -> exp(t T J0 S) for nondegenerate 2x2 S."""
    s = np.asarray(S, dtype=float)
    if s.shape != (2, 2):
        raise ParameterError("closed form requires a 2x2 symmetric matrix")
    if np.linalg.norm(s - s.T) > 1e-10 * (1.0 + np.linalg.norm(s)):
        raise ParameterError("S must be symmetric")
    w = np.linalg.eigvalsh(s)
    if np.min(np.abs(w)) < 1e-12:
        raise ParameterError("S must be nondegenerate")
    sign_s = int(np.sum(w > 0) - np.sum(w < 0))
    if sign_s == 0:
        return HalfInt.from_int(0)
    omega = float(np.sqrt(abs(w[0] * w[1])))
    x = omega * T / (2.0 * np.pi)
    if abs(x - round(x)) < 1e-9:
        raise AdmissibilityError("T is a period of the rotation")
    k = int(np.floor(x))
    return HalfInt((1 + 2 * k) * sign_s)


def maslov_loop(path: PathSpec, tol: ToleranceProfile = DEFAULT_TOL) -> int:
    """Integer winding of the rotation map along a loop."""
    p0 = evaluate_array(path, 0.0)
    p1 = evaluate_array(path, 1.0)
    if np.linalg.norm(p0 - p1) > 1e3 * tol.tol_symp * (1.0 + np.linalg.norm(p0)):
        raise ContractError("maslov_loop requires a loop")
    anchors = _unit_passage_times(lambda t: evaluate_array(path, t),
                                  p0.shape[0])
    f = _nudged(lambda t: _rho_robust(evaluate_array(path, t), tol))
    turns, _, _ = winding(f, tol.max_refine, anchor_ts=anchors)
    r = int(round(turns))
    if abs(turns - r) > 0.1:
        raise InternalConsistencyError(
            f"loop winding {turns:.6f} is not within 0.1 of an integer")
    return r
