"""Batch command line front end.

Reads a JSON job input, runs one computation (cz, rs, rs2, maslov, rho,
normal-form) and prints a deterministic JSON report to stdout.  Optional CSV
traces: for cz/maslov the unwrapped phase samples (with the distance of
psi_t to the identity), for rs/rs2 the sigma_min crossing scan.

Exit codes: 0 success, 1 parse/usage errors, 2 library contract errors
(reported as machine-readable JSON on stdout).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .core import as_array, is_symplectic
from .errors import SympindexError
from .cz import conley_zehnder, maslov_loop, winding
from .halfint import HalfInt
from .lagrangian import lagrangian_rs_index, vertical_frame
from .normal_form import normal_form
from .paths import evaluate_array, path_from_json
from .rs import rs_index
from .spectral import first_kind_eigenvalues, rho
from .tolerances import DEFAULT_TOL

__all__ = ["main", "run"]

_PATH_COMMANDS = {"cz", "rs", "rs2", "maslov"}
_MATRIX_COMMANDS = {"rho", "normal-form"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sympindex",
        description="Indices of symplectic paths and normal forms of "
                    "symplectic matrices.")
    parser.add_argument("--input", required=True,
                        help="JSON file holding the path or matrix")
    parser.add_argument("--command", required=True,
                        choices=sorted(_PATH_COMMANDS | _MATRIX_COMMANDS))
    parser.add_argument("--tol-eig", type=float, default=None)
    parser.add_argument("--tol-kernel", type=float, default=None)
    parser.add_argument("--tol-form", type=float, default=None)
    parser.add_argument("--max-refine", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trace", default=None,
                        help="write a CSV trace next to the report")
    return parser


def _load_input(path: str, command: str):
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if command in _MATRIX_COMMANDS:
        if "matrix" not in obj:
            raise ValueError(f"command {command!r} needs a 'matrix' entry")
        return np.array(obj["matrix"], dtype=float)
    return path_from_json(obj)


def _fmt_float(x: float) -> float:
    return float(f"{float(x):.12g}")


def _write_csv(path: str, header: list[str], rows) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.12g}" if isinstance(v, float) else v
                             for v in row])


def _run_cz(path_spec, tol, seed, trace_file):
    result = conley_zehnder(path_spec, tol, seed=seed)
    if trace_file:
        dim = 2 * path_spec.n
        rows = []
        for t, phase in result.winding_trace:
            smin = float(np.linalg.svd(
                evaluate_array(path_spec, t) - np.eye(dim),
                compute_uv=False)[-1])
            rows.append((float(t), float(phase), smin))
        _write_csv(trace_file, ["t", "phase_rho2", "smin_psi_minus_id"], rows)
    return {
        "value": str(result.value),
        "diagnostics": {
            "endpoint": result.endpoint,
            "extension_winding": _fmt_float(result.extension_winding),
            "det_gap": _fmt_float(result.diagnostics["det_gap"]),
            "refinement_depth": result.diagnostics["refinement_depth"],
        },
    }


def _run_rs(path_spec, tol, trace_file):
    result = rs_index(path_spec, tol)
    if trace_file:
        _write_csv(trace_file, ["t", "smin", "kernel_dim"],
                   [(float(t), float(s), int(k)) for t, s, k in result.trace])
    return {
        "value": str(result.value),
        "diagnostics": {
            "crossings": [
                {"t": _fmt_float(c.t), "kernel_dim": c.kernel_dim,
                 "signature": c.signature, "regular": c.regular,
                 "weight": c.weight}
                for c in result.crossings
            ],
        },
    }


def _run_rs2(path_spec, tol, trace_file):
    v = vertical_frame(path_spec.n)

    def frames(t):
        return evaluate_array(path_spec, t) @ v.frame

    value, reports, trace = lagrangian_rs_index(frames, v, tol)
    if trace_file:
        _write_csv(trace_file, ["t", "smin", "kernel_dim"],
                   [(float(t), float(s), int(k)) for t, s, k in trace])
    return {
        "value": str(value),
        "diagnostics": {
            "crossings": [
                {"t": _fmt_float(c.t), "kernel_dim": c.kernel_dim,
                 "signature": c.signature, "regular": c.regular,
                 "weight": c.weight}
                for c in reports
            ],
        },
    }


def _run_maslov(path_spec, tol, trace_file):
    value = maslov_loop(path_spec, tol)
    report = {"value": value, "diagnostics": {}}
    if trace_file:
        turns, trace, _ = winding(
            lambda t: rho(evaluate_array(path_spec, t), tol), tol.max_refine)
        dim = 2 * path_spec.n
        rows = []
        for t, phase in trace:
            smin = float(np.linalg.svd(
                evaluate_array(path_spec, t) - np.eye(dim),
                compute_uv=False)[-1])
            rows.append((float(t), float(phase), smin))
        _write_csv(trace_file, ["t", "phase_rho", "smin_psi_minus_id"], rows)
    return report


def _run_rho(matrix, tol):
    value = rho(matrix, tol)
    first = first_kind_eigenvalues(matrix, tol)
    return {
        "value_complex": [_fmt_float(value.real), _fmt_float(value.imag)],
        "diagnostics": {
            "first_kind": [[_fmt_float(z.real), _fmt_float(z.imag)]
                           for z in first],
        },
    }


def _run_normal_form(matrix, tol):
    report = normal_form(matrix, tol)
    return {
        "blocks": [
            {"case": b.case, "size": b.size, "jordan_order": b.jordan_order,
             "parameters": [_fmt_float(x) for x in b.lambda_param],
             "d": b.d}
            for b in report.blocks
        ],
        "residual": _fmt_float(report.residual),
        "diagnostics": {},
    }


def run(args) -> dict:
    """Execute a parsed request and return the report dictionary."""
    tol = DEFAULT_TOL.with_overrides(
        tol_eig=args.tol_eig, tol_kernel=args.tol_kernel,
        tol_form=args.tol_form, max_refine=args.max_refine)
    payload = _load_input(args.input, args.command)

    if args.command in _MATRIX_COMMANDS and not is_symplectic(
            as_array(payload), tol):
        from .errors import ContractError

        raise ContractError("input matrix is not symplectic")

    if args.command == "cz":
        body = _run_cz(payload, tol, args.seed, args.trace)
    elif args.command == "rs":
        body = _run_rs(payload, tol, args.trace)
    elif args.command == "rs2":
        body = _run_rs2(payload, tol, args.trace)
    elif args.command == "maslov":
        body = _run_maslov(payload, tol, args.trace)
    elif args.command == "rho":
        body = _run_rho(payload, tol)
    else:
        body = _run_normal_form(payload, tol)

    report = {"command": args.command, "seed": args.seed}
    report.update(body)
    return report


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return 1
    try:
        report = run(args)
    except SympindexError as exc:
        sys.stdout.write(json.dumps(
            {"error": exc.code, "message": str(exc)},
            sort_keys=True, separators=(",", ":")) + "\n")
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 1
    sys.stdout.write(json.dumps(report, sort_keys=True,
                                separators=(",", ":")) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
