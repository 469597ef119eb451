"""Compositional paths in the symplectic group.

A path is a tree of immutable nodes over the parameter domain [0, 1]:
exponential segments, sampled segments with in-group geodesic interpolation,
catenation, pointwise product, pointwise conjugation, symplectic direct sum,
reversal, affine shears and canonical rotation loops.  Every evaluated point
is symplectic by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .core import (SympMatrix, as_array, direct_sum_many, j_matrix,
                   symplectic_residual)
from .errors import DimensionError, ParameterError, SamplingError
from .tolerances import DEFAULT_TOL

__all__ = [
    "PathSpec",
    "ConstPath",
    "ExpPath",
    "SampledPath",
    "CatPath",
    "ProdPath",
    "ConjPath",
    "DirectSumPath",
    "ReversePath",
    "ShearPath",
    "LoopPath",
    "GeneratorSample",
    "evaluate",
    "evaluate_array",
    "generator",
    "make_loop",
    "make_shear",
    "path_to_json",
    "path_from_json",
    "junction_parameters",
]


@dataclass(frozen=True)
class GeneratorSample:
    """Symmetric S_t with psi'_t = J0 S_t psi_t at parameter t."""

    t: float
    s_matrix: np.ndarray
    one_sided: bool = False


class PathSpec:
    """Base class for path nodes; subclasses are frozen dataclasses."""

    @property
    def n(self) -> int:
        raise NotImplementedError

    def _evaluate(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def _init_cache(self):
        object.__setattr__(self, "_cache", {})


def _frozen_array(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


def _check_t(t: float):
    if not (-1e-12 <= t <= 1.0 + 1e-12):
        raise ParameterError(f"path parameter {t} outside [0, 1]")
    return min(max(float(t), 0.0), 1.0)


def evaluate_array(path: PathSpec, t: float) -> np.ndarray:
    """Evaluate to a raw ndarray, memoizing per (path, t)."""
    t = _check_t(t)
    cache = path._cache
    hit = cache.get(t)
    if hit is None:
        hit = path._evaluate(t)
        if len(cache) < 100_000:
            cache[t] = hit
    return hit


def evaluate(path: PathSpec, t: float) -> SympMatrix:
    """Evaluate to a certified symplectic matrix."""
    return SympMatrix(evaluate_array(path, t))


# ---------------------------------------------------------------------------
# node types


@dataclass(frozen=True)
class ConstPath(PathSpec):
    """Constant path t -> A for a fixed symplectic matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        a = _frozen_array(as_array(self.matrix))
        res = symplectic_residual(a)
        if res > DEFAULT_TOL.tol_symp:
            raise ParameterError(
                f"constant path matrix is not symplectic (residual {res:.3e})")
        object.__setattr__(self, "matrix", a)
        self._init_cache()

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2

    def _evaluate(self, t: float) -> np.ndarray:
        return self.matrix


@dataclass(frozen=True)
class ExpPath(PathSpec):
    """t -> exp(t * duration * J0 S) for a symmetric generator S."""

    s_matrix: np.ndarray
    duration: float = 1.0

    def __post_init__(self):
        s = _frozen_array(self.s_matrix)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise DimensionError(f"generator must be even square, got {s.shape}")
        if np.linalg.norm(s - s.T) > 1e-10 * (1.0 + np.linalg.norm(s)):
            raise ParameterError("exponential generator must be symmetric")
        s = _frozen_array(0.5 * (s + s.T))
        object.__setattr__(self, "s_matrix", s)
        object.__setattr__(self, "_js", _frozen_array(j_matrix(s.shape[0] // 2) @ s))
        self._init_cache()

    @property
    def n(self) -> int:
        return self.s_matrix.shape[0] // 2

    def _evaluate(self, t: float) -> np.ndarray:
        return sla.expm((t * self.duration) * self._js)


@dataclass(frozen=True)
class SampledPath(PathSpec):
    """Piecewise in-group geodesic through sampled symplectic matrices."""

    times: np.ndarray
    matrices: tuple

    def __post_init__(self):
        times = _frozen_array(self.times)
        mats = tuple(_frozen_array(as_array(m)) for m in self.matrices)
        if times.ndim != 1 or len(times) != len(mats) or len(mats) < 2:
            raise ParameterError("need matching times and at least two matrices")
        if abs(times[0]) > 1e-12 or abs(times[-1] - 1.0) > 1e-12 or \
                np.any(np.diff(times) <= 0):
            raise ParameterError("times must increase from 0 to 1")
        for m in mats:
            if symplectic_residual(m) > 10 * DEFAULT_TOL.tol_symp:
                raise ParameterError("sampled matrix is not symplectic")
        logs = []
        for a, b in zip(mats[:-1], mats[1:]):
            step = np.linalg.solve(a, b)
            if np.linalg.norm(step - np.eye(step.shape[0])) >= 0.5:
                raise SamplingError(
                    "consecutive samples too far apart for geodesic interpolation")
            lg = sla.logm(step)
            if np.linalg.norm(lg.imag) > 1e-9:
                raise SamplingError("geodesic log has a complex branch")
            logs.append(_frozen_array(lg.real))
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "_logs", tuple(logs))
        self._init_cache()

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0] // 2

    def _evaluate(self, t: float) -> np.ndarray:
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        i = min(max(i, 0), len(self.matrices) - 2)
        t0, t1 = self.times[i], self.times[i + 1]
        s = (t - t0) / (t1 - t0)
        return self.matrices[i] @ sla.expm(s * self._logs[i])


@dataclass(frozen=True)
class CatPath(PathSpec):
    """Catenation of parts, each rescaled to an equal subinterval."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ParameterError("catenation needs at least one part")
        dims = {p.n for p in parts}
        if len(dims) != 1:
            raise DimensionError("catenation parts have mixed dimensions")
        for a, b in zip(parts[:-1], parts[1:]):
            end = a._evaluate(1.0)
            start = b._evaluate(0.0)
            if np.linalg.norm(end - start) / (1.0 + np.linalg.norm(end)) \
                    > 10 * DEFAULT_TOL.tol_symp:
                raise ParameterError("catenation parts do not match at a junction")
        object.__setattr__(self, "parts", parts)
        self._init_cache()

    @property
    def n(self) -> int:
        return self.parts[0].n

    def _evaluate(self, t: float) -> np.ndarray:
        k = len(self.parts)
        u = t * k
        i = min(int(u), k - 1)
        return evaluate_array(self.parts[i], u - i)


@dataclass(frozen=True)
class ProdPath(PathSpec):
    """Pointwise product t -> left(t) @ right(t)."""

    left: PathSpec
    right: PathSpec

    def __post_init__(self):
        if self.left.n != self.right.n:
            raise DimensionError("product factors have different dimensions")
        self._init_cache()

    @property
    def n(self) -> int:
        return self.left.n

    def _evaluate(self, t: float) -> np.ndarray:
        return evaluate_array(self.left, t) @ evaluate_array(self.right, t)


@dataclass(frozen=True)
class ConjPath(PathSpec):
    """Pointwise conjugation t -> phi(t) @ psi(t) @ phi(t)^-1."""

    phi: PathSpec
    psi: PathSpec

    def __post_init__(self):
        if self.phi.n != self.psi.n:
            raise DimensionError("conjugation factors have different dimensions")
        self._init_cache()

    @property
    def n(self) -> int:
        return self.psi.n

    def _evaluate(self, t: float) -> np.ndarray:
        g = evaluate_array(self.phi, t)
        return g @ evaluate_array(self.psi, t) @ np.linalg.inv(g)


@dataclass(frozen=True)
class DirectSumPath(PathSpec):
    """Interleaved symplectic direct sum of paths."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ParameterError("direct sum needs at least one part")
        object.__setattr__(self, "parts", parts)
        self._init_cache()

    @property
    def n(self) -> int:
        return sum(p.n for p in self.parts)

    def _evaluate(self, t: float) -> np.ndarray:
        return direct_sum_many([evaluate_array(p, t) for p in self.parts])


@dataclass(frozen=True)
class ReversePath(PathSpec):
    """t -> inner(1 - t)."""

    inner: PathSpec

    def __post_init__(self):
        self._init_cache()

    @property
    def n(self) -> int:
        return self.inner.n

    def _evaluate(self, t: float) -> np.ndarray:
        return evaluate_array(self.inner, 1.0 - t)


@dataclass(frozen=True)
class ShearPath(PathSpec):
    """Symplectic shear t -> [[Id, B(t)], [0, Id]] with symmetric B(t).

    B is affine between b0 and b1 unless a callable b_func is supplied.
    """

    b0: np.ndarray
    b1: np.ndarray
    b_func: object = field(default=None, compare=False)

    def __post_init__(self):
        b0 = _frozen_array(self.b0)
        b1 = _frozen_array(self.b1)
        for b in (b0, b1):
            if b.ndim != 2 or b.shape[0] != b.shape[1]:
                raise DimensionError("shear blocks must be square")
            if np.linalg.norm(b - b.T) > 1e-9 * (1.0 + np.linalg.norm(b)):
                raise ParameterError("shear blocks must be symmetric")
        if b0.shape != b1.shape:
            raise DimensionError("shear endpoints have different sizes")
        object.__setattr__(self, "b0", b0)
        object.__setattr__(self, "b1", b1)
        self._init_cache()

    @property
    def n(self) -> int:
        return self.b0.shape[0]

    def b_at(self, t: float) -> np.ndarray:
        if self.b_func is not None:
            b = np.asarray(self.b_func(t), dtype=float)
            return 0.5 * (b + b.T)
        return (1.0 - t) * self.b0 + t * self.b1

    def _evaluate(self, t: float) -> np.ndarray:
        m = self.n
        out = np.eye(2 * m)
        out[:m, m:] = self.b_at(t)
        return out


@dataclass(frozen=True)
class LoopPath(PathSpec):
    """Canonical loop: rotation by 2*pi*wind on the first symplectic plane,
    an off-identity stretch a(t) = 1 + 2t(1-t) on the remaining planes."""

    wind: int
    dim_n: int

    def __post_init__(self):
        if self.dim_n < 1:
            raise DimensionError("loop dimension must be >= 1")
        if int(self.wind) != self.wind:
            raise ParameterError("winding must be an integer")
        self._init_cache()

    @property
    def n(self) -> int:
        return self.dim_n

    def _evaluate(self, t: float) -> np.ndarray:
        m = self.dim_n
        if self.wind == 0:
            return np.eye(2 * m)
        th = 2.0 * np.pi * self.wind * t
        out = np.eye(2 * m)
        c, s = np.cos(th), np.sin(th)
        out[0, 0] = c
        out[0, m] = -s
        out[m, 0] = s
        out[m, m] = c
        a = 1.0 + 2.0 * t * (1.0 - t)
        for j in range(1, m):
            out[j, j] = a
            out[m + j, m + j] = 1.0 / a
        return out


# ---------------------------------------------------------------------------
# constructions


def make_loop(n_wind: int, n: int) -> PathSpec:
    """Loop at the identity with rho-degree n_wind in dimension n."""
    return LoopPath(wind=int(n_wind), dim_n=int(n))


def make_shear(b_path) -> PathSpec:
    """Shear path from a callable t -> B(t) or a pair (B0, B1) of endpoints."""
    if callable(b_path):
        b0 = np.asarray(b_path(0.0), dtype=float)
        b1 = np.asarray(b_path(1.0), dtype=float)
        return ShearPath(b0=b0, b1=b1, b_func=b_path)
    b0, b1 = b_path
    return ShearPath(b0=np.asarray(b0, dtype=float), b1=np.asarray(b1, dtype=float))


# ---------------------------------------------------------------------------
# generator sampling


def junction_parameters(path: PathSpec) -> list[float]:
    """Parameters where the path may fail to be smooth."""
    if isinstance(path, CatPath):
        k = len(path.parts)
        out = {i / k for i in range(1, k)}
        for i, p in enumerate(path.parts):
            out.update((i + j) / k for j in junction_parameters(p))
        return sorted(out)
    if isinstance(path, SampledPath):
        return [float(t) for t in path.times[1:-1]]
    if isinstance(path, ReversePath):
        return sorted(1.0 - j for j in junction_parameters(path.inner))
    if isinstance(path, (ProdPath, ConjPath)):
        a = set(junction_parameters(path.left if isinstance(path, ProdPath) else path.phi))
        a.update(junction_parameters(path.right if isinstance(path, ProdPath) else path.psi))
        return sorted(a)
    if isinstance(path, DirectSumPath):
        out = set()
        for p in path.parts:
            out.update(junction_parameters(p))
        return sorted(out)
    return []


def generator(path: PathSpec, t: float, h: float | None = None) -> GeneratorSample:
    """Symmetric generator S_t with psi'_t = J0 S_t psi_t.

    Exponential segments return their generator exactly; everything else uses
    a central finite difference with one Richardson level (one-sided with a
    flag at junctions and global endpoints).
    """
    t = _check_t(t)
    if isinstance(path, ExpPath):
        return GeneratorSample(t=t, s_matrix=path.duration * path.s_matrix)

    jm = j_matrix(path.n)
    psi = evaluate_array(path, t)
    if h is None:
        h = 1e-5 * max(1.0, float(np.linalg.norm(psi)))

    near = [j for j in [0.0, 1.0] + junction_parameters(path) if abs(j - t) < 2 * h]
    one_sided = bool(near)

    def deriv(step: float) -> np.ndarray:
        if not one_sided:
            return (evaluate_array(path, t + step) -
                    evaluate_array(path, t - step)) / (2 * step)
        sgn = 1.0 if t <= 0.5 else -1.0
        s = sgn * step
        return (-3.0 * psi + 4.0 * evaluate_array(path, t + s)
                - evaluate_array(path, t + 2 * s)) / (2 * s)

    d = (4.0 * deriv(h / 2) - deriv(h)) / 3.0
    s_mat = -jm @ d @ np.linalg.inv(psi)
    s_mat = 0.5 * (s_mat + s_mat.T)
    flagged = one_sided and t not in (0.0, 1.0) and bool(
        [j for j in junction_parameters(path) if abs(j - t) < 2 * h])
    return GeneratorSample(t=t, s_matrix=s_mat, one_sided=flagged or one_sided)


# ---------------------------------------------------------------------------
# JSON serialization (shared with the command line front end)


def _node_to_json(path: PathSpec) -> dict:
    if isinstance(path, ConstPath):
        return {"type": "const", "A": path.matrix.tolist()}
    if isinstance(path, ExpPath):
        return {"type": "exp", "S": path.s_matrix.tolist(), "T": path.duration}
    if isinstance(path, SampledPath):
        return {"type": "sampled", "times": path.times.tolist(),
                "matrices": [m.tolist() for m in path.matrices]}
    if isinstance(path, CatPath):
        return {"type": "cat", "parts": [_node_to_json(p) for p in path.parts]}
    if isinstance(path, ProdPath):
        return {"type": "prod", "left": _node_to_json(path.left),
                "right": _node_to_json(path.right)}
    if isinstance(path, ConjPath):
        return {"type": "conj", "phi": _node_to_json(path.phi),
                "psi": _node_to_json(path.psi)}
    if isinstance(path, DirectSumPath):
        return {"type": "dsum", "parts": [_node_to_json(p) for p in path.parts]}
    if isinstance(path, ReversePath):
        return {"type": "reverse", "inner": _node_to_json(path.inner)}
    if isinstance(path, ShearPath):
        if path.b_func is not None:
            raise ParameterError("only affine shears are JSON-serializable")
        return {"type": "shear", "B0": path.b0.tolist(), "B1": path.b1.tolist()}
    if isinstance(path, LoopPath):
        return {"type": "loop", "wind": path.wind}
    raise ParameterError(f"unknown path node {type(path).__name__}")


def path_to_json(path: PathSpec) -> dict:
    return {"n": path.n, "path": _node_to_json(path)}


def _node_from_json(node: dict, n: int) -> PathSpec:
    kind = node.get("type")
    if kind == "const":
        return ConstPath(matrix=np.array(node["A"], dtype=float))
    if kind == "exp":
        return ExpPath(s_matrix=np.array(node["S"], dtype=float),
                       duration=float(node.get("T", 1.0)))
    if kind == "sampled":
        return SampledPath(times=np.array(node["times"], dtype=float),
                           matrices=tuple(np.array(m, dtype=float)
                                          for m in node["matrices"]))
    if kind == "cat":
        return CatPath(parts=tuple(_node_from_json(p, n) for p in node["parts"]))
    if kind == "prod":
        return ProdPath(left=_node_from_json(node["left"], n),
                        right=_node_from_json(node["right"], n))
    if kind == "conj":
        return ConjPath(phi=_node_from_json(node["phi"], n),
                        psi=_node_from_json(node["psi"], n))
    if kind == "dsum":
        return DirectSumPath(parts=tuple(_node_from_json(p, n)
                                         for p in node["parts"]))
    if kind == "reverse":
        return ReversePath(inner=_node_from_json(node["inner"], n))
    if kind == "shear":
        return ShearPath(b0=np.array(node["B0"], dtype=float),
                         b1=np.array(node["B1"], dtype=float))
    if kind == "loop":
        return LoopPath(wind=int(node["wind"]), dim_n=n)
    raise ParameterError(f"unknown path node type {kind!r}")


def path_from_json(obj: dict) -> PathSpec:
    if "path" not in obj or "n" not in obj:
        raise ParameterError("path JSON must contain 'n' and 'path'")
    path = _node_from_json(obj["path"], int(obj["n"]))
    if path.n != int(obj["n"]):
        raise DimensionError("declared n does not match the path nodes")
    return path
