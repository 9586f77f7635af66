import json

import numpy as np
import pytest

HEADER = ("time,mass,energy,pc_energy,strauss_ratio,sup_weighted_amp,"
          "h1,h2,h4,linf,outer_mass_fraction,valid")


def write_run(run_dir, rows, report):
    run_dir.mkdir(parents=True, exist_ok=True)
    lines = [HEADER] + [",".join("%.17g" % x for x in row) for row in rows]
    (run_dir / "diagnostics.csv").write_text("\n".join(lines) + "\n")
    (run_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    return run_dir


def _row(t, amp, valid=1.0, pc=None, h2=2.0):
    pc = amp ** 2 if pc is None else pc
    return [t, 1.0, 0.5, pc, 0.1, amp, 1.5, h2, 4.0, amp, 1e-9, valid]


@pytest.fixture
def reference_run(tmp_path):
    """Synthetic but schema-complete run directory covering every figure
    kind, including two invalid-flagged rows."""
    t = np.linspace(0.0, 40.0, 81)
    amp = 0.8 * (1.0 + t) ** -0.9
    rows = [_row(ti, ai) for ti, ai in zip(t, amp)]
    rows[-1][-1] = 0.0   # two invalid tail samples
    rows[-2][-1] = 0.0
    report = {
        "exit_code": 0,
        "verdicts": {"decay_rate": True},
        "extras": {
            "decay_fit": {"exponent": -0.9, "window": [2.0, 39.0]},
            "ratios": {"2": {"ratio": 1.02, "pass": True}},
            "table": {
                "(inf,2)": {"resolutions": {"256": {"max": 1.0, "median": 1.0},
                                            "512": {"max": 1.0, "median": 1.0}},
                            "variation": 1.0},
                "(4,3)": {"resolutions": {"256": {"max": 0.9, "median": 0.7},
                                          "512": {"max": 0.95, "median": 0.72}},
                          "variation": 1.06},
            },
            "sweep": [
                {"epsilon": 0.1, "budget": 0.03,
                 "times": list(np.linspace(0, 10, 21)),
                 "energy_series": list(0.02 * np.exp(0.05 * np.linspace(0, 10, 21)))},
                {"epsilon": 0.01, "budget": 3e-4,
                 "times": list(np.linspace(0, 10, 21)),
                 "energy_series": list(2e-4 * np.exp(0.05 * np.linspace(0, 10, 21)))},
            ],
        },
    }
    return write_run(tmp_path / "ref", rows, report)


@pytest.fixture
def synthetic_decay_run(tmp_path):
    """Amplitude (1 + t^2)^{-1/2} over a late window: exact slope -1."""
    t = np.linspace(100.0, 4000.0, 200)
    amp = (1.0 + t ** 2) ** -0.5
    rows = [_row(ti, ai) for ti, ai in zip(t, amp)]
    return write_run(tmp_path / "synth", rows,
                     {"exit_code": 0, "verdicts": {}, "extras": {}})
