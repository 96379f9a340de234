"""Command-line driver: each subcommand runs one pipeline and emits a JSON report."""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import classify, flow, models
from .majorize import MajorizationError, majorizes, mirsky_matrix
from .matkit import (
    NotPositiveDefiniteError,
    center_diagonal,
    eigh_jacobi,
    max_abs,
)

_FAILURE_EXIT = 1
_USAGE_EXIT = 2


class CLIError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would sys.exit(2) with a usage dump; route through the JSON error path instead
    def error(self, message):
        raise CLIError(message)


def _float_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise CLIError(f"could not parse '{text}' as a comma-separated list of numbers") from None
    if not values:
        raise CLIError("empty number list")
    return values


def _mat_to_json(M: np.ndarray) -> dict:
    return {"dim": int(M.shape[0]), "data": [float(x) for x in M.ravel()]}


def _mat_from_json(doc) -> np.ndarray:
    if not isinstance(doc, dict) or "dim" not in doc or "data" not in doc:
        raise CLIError("matrix document must be an object with 'dim' and 'data'")
    dim = int(doc["dim"])
    data = np.asarray(doc["data"], dtype=float)
    if dim < 1 or data.shape != (dim * dim,):
        raise CLIError(f"matrix data length {data.size} does not match dim {dim}")
    if not np.all(np.isfinite(data)):
        raise CLIError("matrix contains non-finite entries")
    return data.reshape(dim, dim)


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CLIError(f"malformed JSON in {path}: {exc}") from None


def _emit(payload: dict, out_path: str | None) -> None:
    payload = dict(payload)
    payload["timestamp"] = datetime.now(timezone.utc).isoformat()
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="homscat", description="scattering, signature, and realization pipelines")
    sub = parser.add_subparsers(dest="command", required=True)

    scatter = sub.add_parser("scatter", help="scattering matrix of a model spec")
    scatter.add_argument("--spec", required=True, help="path to a ModelSpec JSON document")
    scatter.add_argument("--tol", type=float, default=flow.DEFAULT_SIGMA_TOL)
    scatter.add_argument("--out", default=None)

    cls = sub.add_parser("classify", help="Hessian and signature of a scattering matrix")
    cls.add_argument("--sigma", required=True, help="path to a matrix JSON document")
    cls.add_argument("--omega", required=True, help="comma-separated centre frequencies")
    cls.add_argument("--tol", type=float, default=None, help="zero-eigenvalue tolerance")
    cls.add_argument("--out", default=None)

    realize = sub.add_parser("realize", help="realize the signature (m, 2l - m)")
    realize.add_argument("--l", type=int, required=True)
    realize.add_argument("--m", type=int, required=True)
    realize.add_argument("--omega", required=True)
    realize.add_argument("--eps", type=float, required=True)
    realize.add_argument("--out", default=None)

    indef = sub.add_parser("indefinite", help="never-definite check over a random ensemble")
    indef.add_argument("--l", type=int, required=True)
    indef.add_argument("--omega", required=True)
    indef.add_argument("--trials", type=int, required=True)
    indef.add_argument("--seed", type=int, required=True)
    indef.add_argument("--tol", type=float, default=1e-9)
    indef.add_argument("--out", default=None)

    rev = sub.add_parser("reversible", help="reversibility check and (l, l) signature")
    rev.add_argument("--spec", required=True)
    rev.add_argument("--tol", type=float, default=1e-7)
    rev.add_argument("--out", default=None)

    mir = sub.add_parser("mirsky", help="symmetric matrix with prescribed diagonal and spectrum")
    mir.add_argument("--diag", required=True)
    mir.add_argument("--eigs", required=True)
    mir.add_argument("--out", default=None)

    maj = sub.add_parser("majorize", help="majorization witness for two vectors")
    maj.add_argument("--a", required=True)
    maj.add_argument("--b", required=True)
    maj.add_argument("--tol", type=float, default=1e-10)
    maj.add_argument("--out", default=None)

    demo = sub.add_parser("demo-integrable", help="eps = 0 model end to end; asserts sigma = I")
    demo.add_argument("--l", type=int, required=True)
    demo.add_argument("--omega", default=None, help="defaults to 1, 2, ..., l")
    demo.add_argument("--tol", type=float, default=1e-8)
    demo.add_argument("--out", default=None)

    return parser


def _cmd_scatter(args) -> tuple[dict, bool]:
    spec = models.ModelSpec.from_json_dict(_load_json(args.spec))
    result = flow.scattering_matrix(models.scattering_problem(spec), tol=args.tol)
    payload = {"command": "scatter", "spec": spec.to_json_dict(), "tol": float(args.tol)}
    payload.update(result.to_json_dict())
    return payload, True


def _cmd_classify(args) -> tuple[dict, bool]:
    sigma = _mat_from_json(_load_json(args.sigma))
    omega = _float_list(args.omega)
    D = center_diagonal(omega)
    H = classify.hessian_from_scattering(sigma, D)
    report = classify.classify_hessian(H, args.tol)
    payload = {
        "command": "classify",
        "omega": omega,
        "hessian": _mat_to_json(H),
        "signature": report.to_json_dict(),
        "degenerate": bool(report.degenerate),
    }
    return payload, True


def _cmd_realize(args) -> tuple[dict, bool]:
    omega = _float_list(args.omega)
    report = classify.realize_signature(args.l, args.m, omega, args.eps)
    payload = {"command": "realize", "omega": omega}
    payload.update(report.to_json_dict())
    return payload, True


def _cmd_indefinite(args) -> tuple[dict, bool]:
    omega = _float_list(args.omega)
    if len(omega) != args.l:
        raise CLIError(f"omega has {len(omega)} entries but --l is {args.l}")
    summary = classify.indefiniteness_ensemble(center_diagonal(omega), args.trials, args.seed, args.tol)
    payload = {"command": "indefinite"}
    payload.update(summary.to_json_dict())
    ok = summary.definite_positive == 0 and summary.definite_negative == 0
    payload["pass"] = bool(ok)
    return payload, ok


def _cmd_reversible(args) -> tuple[dict, bool]:
    spec = models.ModelSpec.from_json_dict(_load_json(args.spec))
    result = flow.scattering_matrix(models.scattering_problem(spec))
    R = classify.center_reversal(spec.l)
    rev = classify.check_reversibility(result.sigma, R, args.tol)
    payload = {
        "command": "reversible",
        "spec": spec.to_json_dict(),
        "sigma": _mat_to_json(result.sigma),
        "reversibility": rev.to_json_dict(),
    }
    if not rev.passed:
        payload["pass"] = False
        return payload, False
    D = center_diagonal(spec.omega)
    report = classify.reversible_signature(result.sigma, R, D, args.tol)
    w = report.eigenvalues
    pairing_defect = float(np.max(np.abs(w + w[::-1])))
    expected = (spec.l, spec.l, 0)
    ok = report.degenerate or report.inertia == expected
    payload.update(
        {
            "signature": report.to_json_dict(),
            "degenerate": bool(report.degenerate),
            "eigenvalue_pairing_defect": pairing_defect,
            "expected_signature": [spec.l, spec.l, 0],
            "pass": bool(ok),
        }
    )
    return payload, ok


def _cmd_mirsky(args) -> tuple[dict, bool]:
    d = np.array(_float_list(args.diag))
    eigs = np.array(_float_list(args.eigs))
    M = mirsky_matrix(d, eigs)
    w, _ = eigh_jacobi(M)
    payload = {
        "command": "mirsky",
        "diag": [float(x) for x in d],
        "eigs": [float(x) for x in eigs],
        "matrix": _mat_to_json(M),
        "diag_error": float(max_abs(np.diag(M) - d)),
        "eigenvalue_error": float(max_abs(np.sort(w) - np.sort(eigs))),
    }
    return payload, True


def _cmd_majorize(args) -> tuple[dict, bool]:
    witness = majorizes(_float_list(args.a), _float_list(args.b), args.tol)
    payload = {"command": "majorize"}
    payload.update(witness.to_json_dict())
    return payload, True


def _cmd_demo_integrable(args) -> tuple[dict, bool]:
    if args.l < 1:
        raise CLIError("--l must be at least 1")
    omega = _float_list(args.omega) if args.omega else [float(k) for k in range(1, args.l + 1)]
    if len(omega) != args.l:
        raise CLIError(f"omega has {len(omega)} entries but --l is {args.l}")
    spec = models.ModelSpec(l=args.l, n_hyp=1, omega=omega, eps=0.0)
    result = flow.scattering_matrix(models.scattering_problem(spec))
    deviation = max_abs(result.sigma - np.eye(2 * args.l))
    ok = deviation <= args.tol
    payload = {
        "command": "demo-integrable",
        "l": int(args.l),
        "omega": omega,
        "tol": float(args.tol),
        "max_deviation_from_identity": float(deviation),
        "pass": bool(ok),
    }
    payload.update(result.to_json_dict())
    return payload, ok


_HANDLERS = {
    "scatter": _cmd_scatter,
    "classify": _cmd_classify,
    "realize": _cmd_realize,
    "indefinite": _cmd_indefinite,
    "reversible": _cmd_reversible,
    "mirsky": _cmd_mirsky,
    "majorize": _cmd_majorize,
    "demo-integrable": _cmd_demo_integrable,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        payload, ok = _HANDLERS[args.command](args)
    except (
        CLIError,
        MajorizationError,
        NotPositiveDefiniteError,
        ValueError,
        ArithmeticError,
        flow.ScatteringConvergenceError,
        classify.RealizationError,
    ) as exc:
        message = " ".join(str(exc).split())
        sys.stderr.write(json.dumps({"error": message}) + "\n")
        return _USAGE_EXIT
    _emit(payload, args.out)
    return 0 if ok else _FAILURE_EXIT


if __name__ == "__main__":
    sys.exit(main())
