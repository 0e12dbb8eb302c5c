"""Gate files and JSON reports.

Gate file::

    {"dims": [2, 2], "matrix": [[[re, im], ...], ...]}

``dims`` may be omitted for power-of-two sizes (all-qubit factorization).
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from .approx import ApproxCertificate, ApproxSeparationResult, LocalHamiltonianFamily
from .exact import SeparationResult
from .generator import UnitaryGate, ValidationError
from .linalg import TensorSpace


class GateFileError(ValidationError):
    """Malformed gate file."""


def _pair(x, where: str) -> complex:
    if (
        not isinstance(x, (list, tuple))
        or len(x) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)
    ):
        raise GateFileError(f"{where}: expected [re, im] pair of numbers, got {x!r}")
    z = complex(float(x[0]), float(x[1]))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise GateFileError(f"{where}: non-finite entry")
    return z


def parse_gate(doc, *, validate: bool = True) -> UnitaryGate:
    """Build a gate from a decoded gate-file document."""
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise GateFileError("gate file must be an object with a 'matrix' field")
    rows = doc["matrix"]
    if not isinstance(rows, list) or not rows:
        raise GateFileError("'matrix' must be a non-empty list of rows")
    size = len(rows)
    entries = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != size:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise GateFileError(f"matrix must be square: row {i} has {got} entries, expected {size}")
        entries.append([_pair(x, f"matrix[{i}][{j}]") for j, x in enumerate(row)])
    m = np.array(entries, dtype=np.complex128)

    dims = doc.get("dims")
    if dims is None:
        space = TensorSpace.infer(size)
    else:
        if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
            raise GateFileError("'dims' must be a list of integers")
        space = TensorSpace(tuple(dims))
        if size != space.total:
            raise GateFileError(f"matrix size {size} ≠ {space.total}")
    return UnitaryGate(m, space, validate=validate)


def loads_gate(text: str, *, validate: bool = True) -> UnitaryGate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GateFileError(f"malformed JSON: {e}") from None
    return parse_gate(doc, validate=validate)


def matrix_to_json(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def gate_doc(m, dims) -> dict:
    return {"dims": list(dims), "matrix": matrix_to_json(m)}


def dumps_gate(m, dims) -> str:
    return json.dumps(gate_doc(m, dims))


def digest(u: UnitaryGate) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(list(u.space.dims)).encode())
    h.update(np.ascontiguousarray(u.matrix).tobytes())
    return h.hexdigest()


def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def separation_to_json(res: SeparationResult) -> dict:
    out = {"verdict": res.verdict.value, "method": res.method.value}
    if res.factors is not None:
        out["factors"] = [gate_doc(f.matrix, f.space.dims) for f in res.factors]
        out["global_phase"] = _c(res.global_phase)
    if math.isfinite(res.residual):
        out["residual"] = res.residual
    if res.cut is not None:
        out["cut"] = {"left": list(res.cut.left), "right": list(res.cut.right)}
    if res.coefficients is not None:
        out["coefficients"] = [float(s) for s in res.coefficients]
    if res.reason:
        out["reason"] = res.reason
    return out


def family_to_json(family: LocalHamiltonianFamily) -> dict:
    return {
        "offset": family.offset,
        "locals": [gate_doc(h, [h.shape[0]]) for h in family.locals],
    }


def certificate_to_json(cert: ApproxCertificate) -> dict:
    return {
        "epsilon": cert.epsilon,
        "t": cert.t,
        "threshold": cert.threshold,
        "residuals": [float(r) for r in cert.residuals],
        "max_residual": float(np.max(cert.residuals)),
        "pass": cert.passed,
    }


def approx_to_json(res: ApproxSeparationResult) -> dict:
    out = {
        "t": res.t,
        "family": family_to_json(res.family),
        "factors": [gate_doc(f.matrix, f.space.dims) for f in res.factors],
        "global_phase": _c(res.global_phase),
        "generator_gap": res.generator_gap,
        "generator_gap_frobenius": res.frobenius_gap,
        "norm": res.norm_kind,
        "bound": res.bound,
        "bound_operator": res.bound_operator,
        "measured": res.measured,
        "measured_phase_free": res.measured_phase_free,
        "optimal_phase": _c(res.optimal_phase),
        "branch_shifted": res.branch_shifted,
    }
    if res.certificate is not None:
        out["certificate"] = certificate_to_json(res.certificate)
    return out
