"""Parametric stand-in for a physical AST skin.

Each (location, frequency) pair carries an exponential response curve::

    amplitude(F) = base + span * exp(-F / tau_n) + noise

and :func:`generate_dataset` replays the calibration protocol shape: every
location is pressed through a grid of force levels and several feature
samples are recorded per level.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from itertools import combinations
from pathlib import Path

import numpy as np

from .dataset import CalibrationDataset, CalibrationRecord
from .dsp import SpectralFeatures
from .errors import ForceOutOfRange, MalformedProfile, SeparabilityViolation
from .rng import SplitMix64

FREQS = (300, 500, 700, 900)
CANONICAL_COORDS = {"A": (17.0, 10.0), "B": (17.0, 30.0), "C": (17.0, 50.0)}
BUNDLED_PROFILES = (
    "ast1", "ast2a", "ast2b", "ast3a", "ast3b", "ast4a", "ast4b", "ast4c", "ast4d",
)
SEPARABILITY_FACTOR = 4.0

_TOP_KEYS = {"skin_id", "force_max_n", "noise_sigma", "locations", "curves"}
_LOC_KEYS = {"label", "x_mm", "y_mm"}
_CURVE_KEYS = {"location", "freq_hz", "base", "span", "tau_n"}


@dataclass(frozen=True)
class ContactLocation:
    label: str
    x_mm: float
    y_mm: float


@dataclass(frozen=True)
class ResponseCurve:
    base: float
    span: float
    tau_n: float

    def __post_init__(self):
        if not self.base >= 0:
            raise MalformedProfile(f"base must be >= 0, got {self.base}")
        if not self.base + self.span >= 0:
            raise MalformedProfile("base + span must be >= 0")
        if not self.tau_n > 0:
            raise MalformedProfile(f"tau_n must be > 0, got {self.tau_n}")

    def mean(self, force_n):
        return self.base + self.span * np.exp(-np.asarray(force_n, dtype=float) / self.tau_n)


@dataclass(frozen=True)
class SkinProfile:
    skin_id: str
    locations: tuple[ContactLocation, ...]
    curves: dict  # (label, freq_hz) -> ResponseCurve
    noise_sigma: float
    force_max_n: float = 30.0

    @property
    def labels(self) -> list[str]:
        return [loc.label for loc in self.locations]

    def location(self, label: str) -> ContactLocation:
        for loc in self.locations:
            if loc.label == label:
                return loc
        raise KeyError(label)

    def zero_force_vector(self, label: str) -> np.ndarray:
        return np.array([self.curves[(label, f)].mean(0.0) for f in FREQS], dtype=float)

    def mean_response(self, label: str, force_n) -> np.ndarray:
        """Noise-free amplitudes, shape ``(len(force_n), 4)``."""
        force = np.atleast_1d(np.asarray(force_n, dtype=float))
        return np.stack([self.curves[(label, f)].mean(force) for f in FREQS], axis=1)

    def validate(self) -> None:
        if self.noise_sigma < 0 or not math.isfinite(self.noise_sigma):
            raise MalformedProfile("noise_sigma must be a finite value >= 0")
        if not self.force_max_n > 0:
            raise MalformedProfile("force_max_n must be > 0")
        labels = self.labels
        if len(labels) != 3 or len(set(labels)) != 3:
            raise MalformedProfile(f"expected 3 distinct locations, got {labels}")
        for label in labels:
            for f in FREQS:
                if (label, f) not in self.curves:
                    raise MalformedProfile(f"missing curve ({label}, {f})")
        if len(self.curves) != 12:
            raise MalformedProfile(f"expected 12 curves, got {len(self.curves)}")
        threshold = SEPARABILITY_FACTOR * self.noise_sigma
        for a, b in combinations(labels, 2):
            gap = np.max(np.abs(self.zero_force_vector(a) - self.zero_force_vector(b)))
            if not gap > threshold:
                raise SeparabilityViolation(
                    a, b, f"max component gap {gap:.6g} <= {threshold:.6g}"
                )

    def to_json(self) -> dict:
        return {
            "skin_id": self.skin_id,
            "force_max_n": self.force_max_n,
            "noise_sigma": self.noise_sigma,
            "locations": [
                {"label": l.label, "x_mm": l.x_mm, "y_mm": l.y_mm} for l in self.locations
            ],
            "curves": [
                {"location": label, "freq_hz": f, "base": c.base, "span": c.span, "tau_n": c.tau_n}
                for (label, f), c in sorted(self.curves.items())
            ],
        }


def _number(obj: dict, key: str, where: str) -> float:
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise MalformedProfile(f"{where}.{key} must be a number")
    return float(v)


def _check_keys(obj, expected: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise MalformedProfile(f"{where} must be an object")
    unknown = set(obj) - expected
    if unknown:
        raise MalformedProfile(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = expected - set(obj)
    if missing:
        raise MalformedProfile(f"{where}: missing field(s) {sorted(missing)}")


def profile_from_json(doc) -> SkinProfile:
    _check_keys(doc, _TOP_KEYS, "profile")
    if not isinstance(doc["skin_id"], str) or not doc["skin_id"]:
        raise MalformedProfile("skin_id must be a non-empty string")
    if not isinstance(doc["locations"], list) or not isinstance(doc["curves"], list):
        raise MalformedProfile("locations and curves must be arrays")

    locations = []
    for i, loc in enumerate(doc["locations"]):
        _check_keys(loc, _LOC_KEYS, f"locations[{i}]")
        if not isinstance(loc["label"], str):
            raise MalformedProfile(f"locations[{i}].label must be a string")
        locations.append(
            ContactLocation(
                loc["label"],
                _number(loc, "x_mm", f"locations[{i}]"),
                _number(loc, "y_mm", f"locations[{i}]"),
            )
        )
    labels = {loc.label for loc in locations}

    curves = {}
    for i, c in enumerate(doc["curves"]):
        where = f"curves[{i}]"
        _check_keys(c, _CURVE_KEYS, where)
        label, freq = c["location"], c["freq_hz"]
        if label not in labels:
            raise MalformedProfile(f"{where}: unknown location {label!r}")
        if freq not in FREQS:
            raise MalformedProfile(f"{where}: freq_hz must be one of {FREQS}")
        key = (label, int(freq))
        if key in curves:
            raise MalformedProfile(f"{where}: duplicate curve {key}")
        curves[key] = ResponseCurve(
            _number(c, "base", where), _number(c, "span", where), _number(c, "tau_n", where)
        )

    profile = SkinProfile(
        skin_id=doc["skin_id"],
        locations=tuple(locations),
        curves=curves,
        noise_sigma=_number(doc, "noise_sigma", "profile"),
        force_max_n=_number(doc, "force_max_n", "profile"),
    )
    profile.validate()
    return profile


def resolve_profile_path(name_or_path) -> Path:
    """Accept a file path or a bundled profile name such as ``ast1``."""
    path = Path(name_or_path)
    if path.exists():
        return path
    stem = path.name
    for suffix in (".json", ".profile"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    if stem in BUNDLED_PROFILES:
        return Path(str(resources.files("astskin") / "profiles" / f"{stem}.json"))
    raise FileNotFoundError(f"no profile file or bundled profile named {name_or_path!r}")


def load_profile(path) -> SkinProfile:
    path = resolve_profile_path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedProfile(f"{path}: invalid JSON ({exc})") from None
    return profile_from_json(doc)


def bundled_profile(name: str) -> SkinProfile:
    return load_profile(name)


def _check_force(p: SkinProfile, force_n: float) -> None:
    if not 0.0 <= force_n <= p.force_max_n:
        raise ForceOutOfRange(f"force {force_n} N outside [0, {p.force_max_n}]")


def response(p: SkinProfile, loc: str, force_n: float, rng: SplitMix64) -> SpectralFeatures:
    _check_force(p, force_n)
    noise = p.noise_sigma * rng.normal(4)
    amps = p.mean_response(loc, force_n)[0] + noise
    return SpectralFeatures.from_sequence(np.maximum(amps, 0.0))


def generate_dataset(
    p: SkinProfile, force_levels: int = 34, samples_per_level: int = 50, seed: int = 7
) -> CalibrationDataset:
    """Rows ordered by location, then force level, then sample.

    Noise is drawn four normals per row, in that same order, from one
    SplitMix64 stream seeded with ``seed``.
    """
    if force_levels < 2:
        raise ValueError("force_levels must be >= 2")
    if samples_per_level < 1:
        raise ValueError("samples_per_level must be >= 1")
    rng = SplitMix64(seed)
    forces = np.linspace(0.0, p.force_max_n, force_levels)
    records = []
    for loc in p.locations:
        for force in forces:
            force = float(force)
            for _ in range(samples_per_level):
                records.append(
                    CalibrationRecord(
                        p.skin_id, loc.label, loc.x_mm, loc.y_mm, force,
                        response(p, loc.label, force, rng),
                    )
                )
    provenance = {
        "generator": "simskin",
        "skin_id": p.skin_id,
        "force_levels": force_levels,
        "samples_per_level": samples_per_level,
        "seed": seed,
    }
    return CalibrationDataset(records, provenance)
