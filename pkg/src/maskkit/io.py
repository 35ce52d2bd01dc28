"""JSON serialization with deterministic, lossless float formatting.

Complex numbers are serialized as two-element [re, im] arrays; floats are
printed with 17 significant digits so every double round-trips exactly and
repeated runs produce byte-identical output. All documents carry a
``"schema": 1`` version field.
"""

from __future__ import annotations

import json

import numpy as np

from .gram import HadamardCertificate, NotCertified, StateSet
from .hadamard import HadamardUnitary
from .masking import FixedReducingSet, Masker

SCHEMA = 1

__all__ = [
    "SCHEMA",
    "InputError",
    "dumps",
    "complex_pair",
    "vector_json",
    "matrix_json",
    "parse_vector",
    "parse_matrix",
    "states_json",
    "parse_states",
    "masker_json",
    "parse_masker",
    "certificate_json",
    "refusal_json",
    "parse_certificate",
    "frs_json",
    "parse_frs",
]


class InputError(ValueError):
    """Malformed or inconsistent input document (CLI exit code 2)."""


def _format_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be serialized")
    s = format(float(x), ".17g")
    if not any(c in s for c in ".e"):
        s += ".0"
    return s


def _emit(obj, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.append(f"{pad}  {json.dumps(str(key))}: ")
            _emit(value, out, indent + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        flat = all(isinstance(x, (bool, int, float, np.integer, np.floating)) for x in items)
        if flat:
            out.append("[" + ", ".join(_scalar(x) for x in items) + "]")
            return
        out.append("[\n")
        for i, value in enumerate(items):
            out.append(pad + "  ")
            _emit(value, out, indent + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(_scalar(obj))


def _scalar(obj) -> str:
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic pretty JSON with %.17g floats; ends with a newline."""
    out: list[str] = []
    _emit(obj, out, 0)
    return "".join(out) + "\n"


def complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def vector_json(v) -> list:
    return [complex_pair(z) for z in np.asarray(v, dtype=complex)]


def matrix_json(m) -> list:
    return [vector_json(row) for row in np.asarray(m, dtype=complex)]


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise InputError(message)


def parse_vector(data, length: int | None = None) -> np.ndarray:
    _require(isinstance(data, list), "expected a list of [re, im] pairs")
    try:
        arr = np.array([complex(p[0], p[1]) for p in data], dtype=complex)
    except (TypeError, IndexError, ValueError) as exc:
        raise InputError(f"malformed complex vector: {exc}") from exc
    _require(length is None or arr.size == length, f"expected a vector of length {length}")
    return arr


def parse_matrix(data, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    _require(isinstance(data, list) and data, "expected a nonempty list of rows")
    mat = np.array([parse_vector(row) for row in data], dtype=complex)
    _require(mat.ndim == 2, "rows have inconsistent lengths")
    _require(rows is None or mat.shape[0] == rows, f"expected {rows} rows")
    _require(cols is None or mat.shape[1] == cols, f"expected {cols} columns")
    return mat


def _check_schema(doc, kind: str) -> None:
    _require(isinstance(doc, dict), f"{kind} document must be a JSON object")
    _require(doc.get("schema") == SCHEMA, f"{kind} document must declare \"schema\": {SCHEMA}")


def states_json(states: StateSet) -> dict:
    return {
        "schema": SCHEMA,
        "dim": states.dim,
        "states": [vector_json(states.vectors[k]) for k in range(states.n)],
    }


def parse_states(doc, tol: float = 1e-9) -> StateSet:
    _check_schema(doc, "states")
    dim = doc.get("dim")
    _require(isinstance(dim, int) and dim >= 1, "\"dim\" must be a positive integer")
    raw = doc.get("states")
    _require(isinstance(raw, list) and raw, "\"states\" must be a nonempty list")
    vectors = np.array([parse_vector(row, dim) for row in raw], dtype=complex)
    try:
        return StateSet.from_vectors(vectors, tol=tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def masker_json(masker: Masker) -> dict:
    anchor = np.asarray(masker.anchor)
    index = int(np.argmax(np.abs(anchor)))
    is_basis = abs(anchor[index] - 1.0) < 1e-12 and np.count_nonzero(anchor) == 1
    doc = {
        "schema": SCHEMA,
        "dA": masker.dim_a,
        "dB": masker.dim_b,
        "anchor_index": index if is_basis else None,
        "matrix": matrix_json(masker.matrix),
    }
    if not is_basis:
        doc["anchor"] = vector_json(anchor)
    return doc


def parse_masker(doc) -> Masker:
    if isinstance(doc, dict) and "masker" in doc:
        doc = doc["masker"]
    _check_schema(doc, "masker")
    d_a, d_b = doc.get("dA"), doc.get("dB")
    _require(isinstance(d_a, int) and d_a >= 1, "\"dA\" must be a positive integer")
    _require(isinstance(d_b, int) and d_b >= 1, "\"dB\" must be a positive integer")
    m = parse_matrix(doc.get("matrix"), d_a * d_b, d_a * d_b)
    if doc.get("anchor") is not None:
        anchor = parse_vector(doc["anchor"], d_b)
    else:
        index = doc.get("anchor_index")
        _require(isinstance(index, int) and 0 <= index < d_b, "\"anchor_index\" out of range")
        anchor = np.zeros(d_b, dtype=complex)
        anchor[index] = 1.0
    defect = float(np.linalg.norm(m.conj().T @ m - np.eye(d_a * d_b)))
    _require(defect <= 1e-6, f"masker matrix is not unitary (defect {defect:.3e})")
    return Masker(matrix=m, dim_a=d_a, dim_b=d_b, anchor=anchor)


def certificate_json(cert: HadamardCertificate) -> dict:
    return {
        "schema": SCHEMA,
        "certified": True,
        "n": cert.n,
        "U": matrix_json(cert.unitary.matrix),
        "spectrum": [float(x) for x in cert.spectrum],
        "residual": float(cert.residual),
    }


def refusal_json(refusal: NotCertified) -> dict:
    return {
        "schema": SCHEMA,
        "certified": False,
        "reason": refusal.reason,
        "inconclusive": refusal.inconclusive,
        "diagnostics": {k: v for k, v in sorted(refusal.diagnostics.items())},
    }


def parse_certificate(doc) -> HadamardCertificate:
    if isinstance(doc, dict) and "certificate" in doc:
        doc = doc["certificate"]
    _check_schema(doc, "certificate")
    _require(doc.get("certified") is True, "document does not contain a certificate")
    n = doc.get("n")
    _require(isinstance(n, int) and n >= 1, "\"n\" must be a positive integer")
    u = parse_matrix(doc.get("U"), n, n)
    spectrum = doc.get("spectrum")
    _require(
        isinstance(spectrum, list) and len(spectrum) == n
        and all(isinstance(x, (int, float)) for x in spectrum),
        "\"spectrum\" must list n real eigenvalues",
    )
    try:
        unitary = HadamardUnitary.from_matrix(u, tol=1e-6)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    residual = doc.get("residual", 0.0)
    _require(isinstance(residual, (int, float)), "\"residual\" must be a number")
    return HadamardCertificate(unitary, np.asarray(spectrum, dtype=float), float(residual))


def frs_json(frs: FixedReducingSet) -> dict:
    return {
        "schema": SCHEMA,
        "n": frs.n,
        "r": frs.r,
        "dA": frs.dim_a,
        "dB": frs.dim_b,
        "weights": [float(w) for w in frs.weights],
        "theta": [[float(x) for x in row] for row in frs.theta],
        "phiA": matrix_json(frs.phi_a),
        "psiB": matrix_json(frs.psi_b),
    }


def parse_frs(doc) -> FixedReducingSet:
    if isinstance(doc, dict) and "fixed_reducing" in doc:
        doc = doc["fixed_reducing"]
    _check_schema(doc, "fixed-reducing")
    n, r = doc.get("n"), doc.get("r")
    d_a, d_b = doc.get("dA"), doc.get("dB")
    for name, val in (("n", n), ("r", r), ("dA", d_a), ("dB", d_b)):
        _require(isinstance(val, int) and val >= 1, f"\"{name}\" must be a positive integer")
    weights = doc.get("weights")
    _require(
        isinstance(weights, list) and len(weights) == r
        and all(isinstance(x, (int, float)) for x in weights),
        "\"weights\" must list r positive reals",
    )
    theta = doc.get("theta")
    _require(
        isinstance(theta, list) and len(theta) == r
        and all(isinstance(row, list) and len(row) == n for row in theta),
        "\"theta\" must be an r x n real matrix",
    )
    return FixedReducingSet(
        weights=np.asarray(weights, dtype=float),
        phi_a=parse_matrix(doc.get("phiA"), d_a, r),
        psi_b=parse_matrix(doc.get("psiB"), d_b, r),
        theta=np.asarray(theta, dtype=float),
        n=n,
        r=r,
    )
