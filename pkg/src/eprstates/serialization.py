"""JSON and CSV formats for states, observables, reports, and tables.

Complex numbers are always serialized as two-element [re, im] arrays.
State files carry {"dim1", "dim2", "coeffs"}; observable files carry
{"dim", "matrix"}.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .analysis import EprReport, SchmidtDecomposition
from .errors import ParseError, SchemaError
from .linalg import DEFAULT_TOL, Tolerances
from .measurement import DiscreteJointDistribution
from .states import Observable, PureState


def complex_to_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_nested(matrix) -> list:
    return [[complex_to_pair(entry) for entry in row] for row in np.asarray(matrix)]


def _entry_to_complex(entry, where: str) -> complex:
    if (
        not isinstance(entry, (list, tuple))
        or len(entry) != 2
        or not all(isinstance(part, (int, float)) for part in entry)
    ):
        raise SchemaError(f"{where} must be a [re, im] pair, got {entry!r}")
    return complex(entry[0], entry[1])


def nested_to_matrix(data, rows: int, cols: int, name: str) -> np.ndarray:
    if not isinstance(data, list) or len(data) != rows:
        raise SchemaError(f"{name} must be a list of {rows} rows")
    matrix = np.empty((rows, cols), dtype=np.complex128)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaError(f"{name}[{i}] must be a list of {cols} entries")
        for j, entry in enumerate(row):
            matrix[i, j] = _entry_to_complex(entry, f"{name}[{i}][{j}]")
    return matrix


def _require_positive_int(data, key: str) -> int:
    value = data.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise SchemaError(f"field {key!r} must be a positive integer, got {value!r}")
    return value


def state_to_dict(state: PureState) -> dict:
    return {
        "dim1": state.space1.dim,
        "dim2": state.space2.dim,
        "coeffs": matrix_to_nested(state.coeffs),
    }


def state_from_dict(data) -> PureState:
    if not isinstance(data, dict):
        raise SchemaError("state document must be a JSON object")
    dim1 = _require_positive_int(data, "dim1")
    dim2 = _require_positive_int(data, "dim2")
    if "coeffs" not in data:
        raise SchemaError("state document is missing field 'coeffs'")
    coeffs = nested_to_matrix(data["coeffs"], dim1, dim2, "coeffs")
    return PureState(coeffs)


def observable_to_dict(observable: Observable) -> dict:
    return {
        "dim": observable.dim,
        "matrix": matrix_to_nested(observable.matrix),
    }


def observable_from_dict(data, tol: Tolerances = DEFAULT_TOL) -> Observable:
    if not isinstance(data, dict):
        raise SchemaError("observable document must be a JSON object")
    dim = _require_positive_int(data, "dim")
    if "matrix" not in data:
        raise SchemaError("observable document is missing field 'matrix'")
    matrix = nested_to_matrix(data["matrix"], dim, dim, "matrix")
    return Observable(matrix, tol)


def load_json(path) -> object:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from exc


def load_state(path) -> PureState:
    return state_from_dict(load_json(path))


def load_observable(path, tol: Tolerances = DEFAULT_TOL) -> Observable:
    return observable_from_dict(load_json(path), tol)


def decomposition_to_dict(decomposition: SchmidtDecomposition) -> dict:
    return {
        "lambdas": [float(v) for v in decomposition.lambdas],
        "multiplicities": list(decomposition.multiplicities),
        "kernel_dim": decomposition.kernel_dim,
        "total_weight": decomposition.total_weight(),
        "imbedding": matrix_to_nested(decomposition.imbedding.matrix),
    }


def report_to_dict(report: EprReport) -> dict:
    return {
        "is_epr": report.is_epr,
        "observables": [
            {
                "label": v.label,
                "commutator_norm": v.commutator_norm,
                "threshold": v.threshold,
                "passed": v.passed,
            }
            for v in report.per_observable
        ],
        "schmidt": decomposition_to_dict(report.decomposition),
    }


def dumps_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def joint_to_rows(joint: DiscreteJointDistribution) -> list:
    rows = []
    for i, a in enumerate(joint.a_values):
        for j, b in enumerate(joint.b_values):
            rows.append((float(a), float(b), float(joint.table[i, j])))
    return rows


def write_joint_csv(joint: DiscreteJointDistribution, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["a", "b", "p"])
    for a, b, p in joint_to_rows(joint):
        writer.writerow([repr(a), repr(b), repr(p)])


def write_sweep_csv(rows, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["N", "epsilon", "pairing", "target", "abs_error"])
    for row in rows:
        writer.writerow(
            [row.n, repr(row.epsilon), repr(row.pairing), repr(row.target), repr(row.abs_error)]
        )
