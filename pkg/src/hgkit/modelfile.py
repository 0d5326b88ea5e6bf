"""JSON model-file format shared by the CLI and the search emitter.

Lie-algebra model files carry structure constants as sparse 1-based
entries with i < j (skew completion implied); point-model files carry the
dense F1/F2 component arrays.  Floats round-trip bit-exactly through
``json`` (repr-based serialization), so a written model re-parses to
identical tensors.
"""

from __future__ import annotations

import json

import numpy as np

from .model import LieAlgebraModel, PointModel
from .tensor_core import (
    Dim,
    HypercomplexTriple,
    Metric,
    StructureError,
    standard_hypercomplex,
    standard_metric,
)


class ModelFileError(ValueError):
    """Malformed model file (schema/parse level): CLI exit code 2."""


class ModelValidationError(ValueError):
    """Well-formed file whose content fails structure validation: exit 3."""


def _parse_matrix(obj, d, what):
    arr = np.asarray(obj, dtype=float)
    if arr.shape == (d * d,):
        arr = arr.reshape(d, d)
    if arr.shape != (d, d):
        raise ModelFileError(f"{what}: expected {d}x{d} row-major array, got shape {arr.shape}")
    return arr


def _parse_metric(obj, dim: Dim) -> Metric:
    if obj == "standard" or obj is None:
        return standard_metric(dim)
    try:
        return Metric.from_components(_parse_matrix(obj, dim.d, "metric"))
    except StructureError as e:
        raise ModelValidationError(f"metric: {e}") from e


def _parse_hypercomplex(obj, dim: Dim) -> HypercomplexTriple:
    if obj == "standard" or obj is None:
        return standard_hypercomplex(dim)
    if not isinstance(obj, (list, tuple)) or len(obj) != 3:
        raise ModelFileError("hypercomplex: expected \"standard\" or three matrices")
    J1, J2, J3 = (_parse_matrix(o, dim.d, f"hypercomplex[{i}]") for i, o in enumerate(obj))
    return HypercomplexTriple(J1=J1, J2=J2, J3=J3)


def _parse_dimension(doc) -> Dim:
    d = doc.get("dimension")
    if not isinstance(d, int) or d <= 0 or d % 4 != 0:
        raise ModelFileError(f"dimension: expected a positive multiple of 4, got {d!r}")
    return Dim(d // 4)


def load_model(path: str):
    """Parse a model file; returns LieAlgebraModel or PointModel.

    Raises ModelFileError for schema problems (exit 2) and
    ModelValidationError for content that fails structure validation
    (exit 3).
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ModelFileError(f"{path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ModelFileError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ModelFileError(f"{path}: top level must be an object")

    dim = _parse_dimension(doc)
    g = _parse_metric(doc.get("metric", "standard"), dim)
    H = _parse_hypercomplex(doc.get("hypercomplex", "standard"), dim)

    if "structure_constants" in doc:
        C = _parse_structure_constants(doc["structure_constants"], dim.d)
        try:
            return LieAlgebraModel.create(C, g=g, H=H, jacobi="warn")
        except StructureError as e:
            raise ModelValidationError(str(e)) from e
    if "F1" in doc or "F2" in doc:
        d = dim.d
        F1 = np.asarray(doc.get("F1", np.zeros((d, d, d)).tolist()), dtype=float)
        F2 = np.asarray(doc.get("F2", np.zeros((d, d, d)).tolist()), dtype=float)
        for name, F in (("F1", F1), ("F2", F2)):
            if F.shape == (d ** 3,):
                F = F.reshape(d, d, d)
            if F.shape != (d, d, d):
                raise ModelFileError(f"{name}: expected {d}^3 components, got shape {F.shape}")
        return PointModel(dim=dim, g=g, H=H,
                          F1=F1.reshape(d, d, d), F2=F2.reshape(d, d, d))
    raise ModelFileError(f"{path}: need either structure_constants or F1/F2 fields")


def _parse_structure_constants(entries, d: int) -> np.ndarray:
    if not isinstance(entries, list):
        raise ModelFileError("structure_constants: expected a list of {i,j,k,value}")
    C = np.zeros((d, d, d))
    seen = set()
    for pos, ent in enumerate(entries):
        try:
            i, j, k, v = ent["i"], ent["j"], ent["k"], float(ent["value"])
        except (TypeError, KeyError) as e:
            raise ModelFileError(f"structure_constants[{pos}]: missing field {e}") from e
        for name, idx in (("i", i), ("j", j), ("k", k)):
            if not isinstance(idx, int) or not (1 <= idx <= d):
                raise ModelFileError(
                    f"structure_constants[{pos}]: index {name}={idx!r} outside 1..{d}")
        if i >= j:
            raise ModelValidationError(
                f"structure_constants[{pos}]: non-skew entry (i,j,k)=({i},{j},{k}); "
                "only i < j entries are allowed, skew completion is implied")
        if (i, j, k) in seen:
            raise ModelValidationError(
                f"structure_constants[{pos}]: duplicate entry (i,j,k)=({i},{j},{k})")
        seen.add((i, j, k))
        C[i - 1, j - 1, k - 1] = v
        C[j - 1, i - 1, k - 1] = -v
    return C


def _matrix_field(arr, standard) -> object:
    return "standard" if np.array_equal(arr, standard) else np.asarray(arr).tolist()


def dump_lie_model(m: LieAlgebraModel, tolerance: float = None) -> dict:
    doc = {
        "dimension": m.d,
        "metric": _matrix_field(m.g.components, standard_metric(m.dim).components),
        "hypercomplex": "standard" if all(
            np.array_equal(a, b) for a, b in zip(m.H, standard_hypercomplex(m.dim)))
        else [J.tolist() for J in m.H],
        "structure_constants": [
            {"i": i + 1, "j": j + 1, "k": k + 1, "value": float(m.C[i, j, k])}
            for i in range(m.d) for j in range(i + 1, m.d) for k in range(m.d)
            if m.C[i, j, k] != 0.0
        ],
    }
    if tolerance is not None:
        doc["tolerance"] = tolerance
    return doc


def dump_point_model(p: PointModel, tolerance: float = None) -> dict:
    doc = {
        "dimension": p.dim.d,
        "metric": _matrix_field(p.g.components, standard_metric(p.dim).components),
        "hypercomplex": "standard" if all(
            np.array_equal(a, b) for a, b in zip(p.H, standard_hypercomplex(p.dim)))
        else [J.tolist() for J in p.H],
        "F1": p.F1.tolist(),
        "F2": p.F2.tolist(),
    }
    if tolerance is not None:
        doc["tolerance"] = tolerance
    return doc


def save_model(path: str, model, tolerance: float = None) -> None:
    if isinstance(model, LieAlgebraModel):
        doc = dump_lie_model(model, tolerance)
    elif isinstance(model, PointModel):
        doc = dump_point_model(model, tolerance)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def file_tolerance(path: str, default: float) -> float:
    try:
        with open(path) as fh:
            doc = json.load(fh)
        tol = doc.get("tolerance")
        return float(tol) if tol is not None else default
    except Exception:
        return default
