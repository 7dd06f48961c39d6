"""Force regressors and location classifiers over the four tone amplitudes."""

from .model import (
    TrainedModel,
    fit,
    predict_force,
    predict_force_var,
    predict_location,
    train,
)
from .persist import load_model, save_model
from .spec import FORCE, LOCATION, ModelSpec, preset, preset_names, registry

__all__ = [
    "FORCE",
    "LOCATION",
    "ModelSpec",
    "TrainedModel",
    "fit",
    "load_model",
    "predict_force",
    "predict_force_var",
    "predict_location",
    "preset",
    "preset_names",
    "registry",
    "save_model",
    "train",
]
