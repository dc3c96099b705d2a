"""Weights files: JSON documents naming a model and its trained angles.

``{"model": "qcl", "weights": [0.99, -0.5, 3.27, -0.69]}``

A ``custom`` model points at a circuit text file instead; the path is
resolved relative to the weights file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .circuit import Circuit, load_circuit
from .models import MODEL_ARITY, build_model

MODEL_KINDS = tuple(MODEL_ARITY) + ("custom",)


class WeightsError(ValueError):
    pass


class WeightsFileMissing(WeightsError, FileNotFoundError):
    pass


class WeightsSchemaError(WeightsError):
    pass


class WeightsArityError(WeightsError):
    pass


@dataclass(frozen=True)
class WeightsFile:
    model: str
    weights: tuple[float, ...]
    circuit_path: Path | None = None

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise WeightsSchemaError(f"unknown model {self.model!r}; expected one of {list(MODEL_KINDS)}")
        if self.model == "custom":
            if self.circuit_path is None:
                raise WeightsSchemaError("custom model requires circuit_path")
        elif len(self.weights) != MODEL_ARITY[self.model]:
            raise WeightsArityError(f"{self.model} takes {MODEL_ARITY[self.model]} weights, got {len(self.weights)}")

    def circuit(self) -> Circuit:
        if self.model == "custom":
            return load_circuit(self.circuit_path)
        return build_model(self.model, self.weights)

    def to_json(self) -> dict:
        d = {"model": self.model, "weights": list(self.weights)}
        if self.circuit_path is not None:
            d["circuit_path"] = str(self.circuit_path)
        return d


def parse_weights(doc, base: Path | None = None) -> WeightsFile:
    if not isinstance(doc, dict):
        raise WeightsSchemaError("weights file must be a JSON object")
    unknown = set(doc) - {"model", "weights", "circuit_path", "note"}
    if unknown:
        raise WeightsSchemaError(f"unexpected keys: {sorted(unknown)}")
    model = doc.get("model")
    if not isinstance(model, str):
        raise WeightsSchemaError("'model' must be a string")
    ws = doc.get("weights")
    if not isinstance(ws, list) or not all(isinstance(w, (int, float)) and not isinstance(w, bool) for w in ws):
        raise WeightsSchemaError("'weights' must be a list of numbers")
    cpath = doc.get("circuit_path")
    if cpath is not None:
        if not isinstance(cpath, str):
            raise WeightsSchemaError("'circuit_path' must be a string")
        cpath = Path(cpath)
        if base is not None and not cpath.is_absolute():
            cpath = base / cpath
    return WeightsFile(model.lower(), tuple(float(w) for w in ws), cpath)


def load_weights(path) -> WeightsFile:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise WeightsFileMissing(f"weights file not found: {path}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise WeightsSchemaError(f"{path}: invalid JSON ({e})") from None
    return parse_weights(doc, path.parent)
