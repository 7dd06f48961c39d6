"""Model files: JSON with every real stored as a hex-float string.

Arrays are encoded as ``{"shape": [...], "hex": [...]}`` (float64) or
``{"shape": [...], "int": [...]}`` (int64), flattened in C order.
"""

from __future__ import annotations

import json
import os

import numpy as np

from ..errors import InvalidModelSpec, MalformedModelFile, VersionMismatch
from .model import TrainedModel, estimator_from_params
from .spec import ModelSpec

FORMAT_VERSION = 1
_FIELDS = ("format_version", "task", "kind", "hyperparameters", "standardization",
           "parameters", "training_meta")


def _encode(value):
    if isinstance(value, np.ndarray):
        if value.dtype.kind == "f":
            return {"shape": list(value.shape), "hex": [float(v).hex() for v in value.ravel()]}
        if value.dtype.kind in "iu":
            return {"shape": list(value.shape), "int": [int(v) for v in value.ravel()]}
        raise TypeError(f"cannot encode array of dtype {value.dtype}")
    if isinstance(value, (float, np.floating)):
        return {"hex": float(value).hex()}
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, np.integer):
        return int(value)
    raise TypeError(f"cannot encode {type(value).__name__}")


def _decode(value):
    if isinstance(value, dict):
        if "hex" in value and set(value) <= {"hex", "shape"}:
            if "shape" not in value:
                return float.fromhex(value["hex"])
            data = np.array([float.fromhex(h) for h in value["hex"]], dtype=np.float64)
            return data.reshape(value["shape"])
        if "int" in value and set(value) == {"int", "shape"}:
            return np.array(value["int"], dtype=np.int64).reshape(value["shape"])
        return {k: _decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    return value


def model_to_json(m: TrainedModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "task": m.spec.task,
        "kind": m.spec.kind,
        "hyperparameters": dict(m.spec.hyperparameters),
        "name": m.spec.name,
        "classes": list(m.classes),
        "standardization": {"means": _encode(m.means), "scales": _encode(m.scales)},
        "parameters": _encode(m.estimator.get_params()),
        "training_meta": m.training_meta,
    }


def dumps(m: TrainedModel) -> str:
    return json.dumps(model_to_json(m), indent=1, sort_keys=True) + "\n"


def save_model(m: TrainedModel, path) -> None:
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(m))
    os.replace(tmp, path)


def model_from_json(doc) -> TrainedModel:
    if not isinstance(doc, dict):
        raise MalformedModelFile("model file must contain a JSON object")
    if "format_version" in doc and doc["format_version"] != FORMAT_VERSION:
        raise VersionMismatch(
            f"model format_version {doc['format_version']!r}, this build reads {FORMAT_VERSION}"
        )
    missing = [f for f in _FIELDS if f not in doc]
    if missing:
        raise MalformedModelFile(f"model file missing field(s) {missing}")
    try:
        spec = ModelSpec(doc["task"], doc["kind"], doc["hyperparameters"], doc.get("name", ""))
        std = doc["standardization"]
        means = np.asarray(_decode(std["means"]), dtype=np.float64)
        scales = np.asarray(_decode(std["scales"]), dtype=np.float64)
        classes = list(doc.get("classes", []))
        estimator = estimator_from_params(spec, _decode(doc["parameters"]), len(classes))
    except InvalidModelSpec as exc:
        raise MalformedModelFile(f"invalid model spec: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedModelFile(f"invalid model parameters: {exc!r}") from None
    if means.shape != (4,) or scales.shape != (4,) or not np.all(scales > 0):
        raise MalformedModelFile("standardization must hold 4 means and 4 positive scales")
    return TrainedModel(spec, estimator, means, scales, classes, doc["training_meta"])


def loads(text: str) -> TrainedModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedModelFile(f"not valid JSON: {exc}") from None
    return model_from_json(doc)


def load_model(path) -> TrainedModel:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
