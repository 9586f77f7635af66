from .manifest import RunManifest, ManifestError, DEFAULT_THRESHOLDS
from .fits import FitResult, decay_fit, stability_fit, log_growth_criterion
from .runner import run_scenario, RunResult

__all__ = [
    "RunManifest", "ManifestError", "DEFAULT_THRESHOLDS",
    "FitResult", "decay_fit", "stability_fit", "log_growth_criterion",
    "run_scenario", "RunResult",
]
