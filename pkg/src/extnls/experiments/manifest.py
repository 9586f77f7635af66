"""Run manifests: the full experiment configuration.

A manifest is a JSON object with a strict schema (unknown keys are
errors).  Identical manifests produce byte-identical CSV outputs on one
platform, so every knob that affects the numbers lives here, including
the calibration thresholds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

SCHEMA_VERSION = "extnls-manifest-1"

SCENARIOS = (
    "RadialGlobal", "DecayRate", "NonInflation", "Perturbed", "Stability",
    "LinearStrichartz", "CompatCheck", "WConsistency",
)

DEFAULT_THRESHOLDS = {
    # mass fraction in the outer 10% shell that invalidates a sample
    "horizon_mass_fraction": 1e-6,
    "mass_drift_max": 1e-10,
    "energy_drift_max": 1e-4,
    # allowed increase of cone/pseudoconformal energy, relative to initial
    "monotonicity_rel_tol": 1e-4,
    # envelope decay margin below the -1 rate
    "decay_exponent_max": -0.85,
    # max/min spread of ensemble-max Strichartz quotients across resolutions
    "strichartz_variation_max": 2.0,
    "noninflation_ratio_max": 3.0,
    # mean second-difference of log E(w) per unit time^2
    "stability_log_curvature_tol": 0.1,
}

_TOP_KEYS = {
    "scenario", "n", "p", "r_max", "num_radial", "num_angular", "dt",
    "t_final", "sample_stride", "seed", "initial_data", "output_dir",
    "scheme", "thresholds", "options", "schema",
}

_OPTION_KEYS = {
    "RadialGlobal": set(),
    "DecayRate": {"fit_window"},
    "NonInflation": {"orders", "split_time"},
    "Perturbed": {"epsilons", "perturbation"},
    "Stability": {"epsilons", "perturbation"},
    "LinearStrichartz": {"pairs", "ensemble_size", "resolutions", "mode_count"},
    "CompatCheck": {"order", "kind"},
    "WConsistency": {"epsilon", "perturbation", "dt_levels"},
}


class ManifestError(ValueError):
    pass


@dataclass
class RunManifest:
    scenario: str
    n: int
    p: float
    r_max: float
    num_radial: int
    dt: float
    t_final: float
    num_angular: int = 1
    sample_stride: int = 10
    seed: int = 0
    initial_data: dict = field(default_factory=lambda: {"profile": "gaussian_ring"})
    output_dir: str = ""
    scheme: str = "CrankNicolsonStrang"
    thresholds: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ManifestError(f"unknown scenario '{self.scenario}'; "
                                f"expected one of {SCENARIOS}")
        if self.scheme != "CrankNicolsonStrang":
            raise ManifestError(f"unknown scheme '{self.scheme}'")
        unknown_thr = set(self.thresholds) - set(DEFAULT_THRESHOLDS)
        if unknown_thr:
            raise ManifestError(f"unknown threshold keys: {sorted(unknown_thr)}")
        allowed = _OPTION_KEYS[self.scenario]
        unknown_opt = set(self.options) - allowed
        if unknown_opt:
            raise ManifestError(
                f"unknown options for {self.scenario}: {sorted(unknown_opt)}; "
                f"allowed: {sorted(allowed)}")
        if self.dt <= 0 or self.t_final <= 0:
            raise ManifestError("dt and t_final must be positive")
        if self.sample_stride < 1:
            raise ManifestError("sample_stride must be >= 1")

    @property
    def effective_thresholds(self) -> dict:
        out = dict(DEFAULT_THRESHOLDS)
        out.update(self.thresholds)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        if not isinstance(data, dict):
            raise ManifestError("manifest must be a JSON object")
        data = dict(data)
        schema = data.pop("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise ManifestError(f"unsupported manifest schema '{schema}'")
        unknown = set(data) - _TOP_KEYS
        if unknown:
            raise ManifestError(f"unknown manifest keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ManifestError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "RunManifest":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"manifest is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["schema"] = SCHEMA_VERSION
        return out

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
