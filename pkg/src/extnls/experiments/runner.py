"""Scenario runner: drives the solver, samples diagnostics, runs the
scenario-specific audits, and writes deterministic CSV/JSON artifacts."""

from __future__ import annotations

import json
import math
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from ..domain import ModelParams, FieldState, Representation, build_domain
from ..operators import (LaplacianOp, PropagatorConfig, linear_step,
                         strang_step, perturbed_step)
from ..functionals import (DiagnosticsRecord, compute_diagnostics, mass,
                           energy, sobolev_norm, stability_energy,
                           check_admissible, _lp_norm)
from ..compat import linear_compat_sequence, nonlinear_compat_sequence
from ..pseudoconformal import monotonicity_audit
from ..profiles import make_initial_state, eigenmode_sum
from .manifest import RunManifest
from .fits import decay_fit, stability_fit, noninflation_ratios, loglog_slope

CSV_HEADER = ("time,mass,energy,pc_energy,strauss_ratio,sup_weighted_amp,"
              "h1,h2,h4,linf,outer_mass_fraction,valid")


class RunAnomaly(RuntimeError):
    """Non-finite field encountered during a run."""

    def __init__(self, step: int, time: float):
        super().__init__(f"non-finite field at step {step}, t = {time:g}")
        self.step = step
        self.time = time


@dataclass
class RunResult:
    manifest: RunManifest
    records: list
    report: dict
    exit_code: int
    csv_path: str = ""
    report_path: str = ""


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    return f"{x:.17g}"


def _record_row(rec: DiagnosticsRecord) -> str:
    return ",".join([
        _fmt(rec.time), _fmt(rec.mass), _fmt(rec.energy), _fmt(rec.pc_energy),
        _fmt(rec.strauss_ratio), _fmt(rec.sup_weighted_amp),
        _fmt(rec.sobolev[1]), _fmt(rec.sobolev[2]), _fmt(rec.sobolev[4]),
        _fmt(rec.linf), _fmt(rec.outer_mass_fraction), _fmt(rec.valid),
    ])


def write_csv(path, records) -> None:
    lines = [CSV_HEADER] + [_record_row(r) for r in records]
    Path(path).write_text("\n".join(lines) + "\n")


def _environment_stamp() -> dict:
    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


def _setup(man: RunManifest):
    params = ModelParams(n=man.n, p=man.p, r_max=man.r_max)
    domain = build_domain(params, man.num_radial, man.num_angular)
    op = LaplacianOp(domain)
    cfg = PropagatorConfig(dt=man.dt)
    state = make_initial_state(domain, man.initial_data)
    return params, domain, op, cfg, state


def _check_finite(state: FieldState, step: int) -> None:
    if not np.all(np.isfinite(state.values)):
        raise RunAnomaly(step, state.time)


def evolve(op, params, cfg, state, t_final, stride, *, linear=False,
           horizon_fraction=1e-6, keep_snapshots=False):
    """March to t_final, sampling diagnostics every `stride` steps.

    Returns (final state, records, snapshots); snapshots is empty unless
    requested.  Raises RunAnomaly on a non-finite field.
    """
    n_steps = max(1, round(t_final / cfg.dt))
    records = [compute_diagnostics(params, state, op, horizon_fraction)]
    snapshots = [state.copy()] if keep_snapshots else []
    for step in range(1, n_steps + 1):
        try:
            if linear:
                state = linear_step(op, cfg, state)
            else:
                state = strang_step(op, params, cfg, state)
        except ValueError as exc:
            # the banded solver rejects non-finite fields before our own
            # post-step check can see them
            if "infs or NaNs" in str(exc):
                raise RunAnomaly(step, state.time) from None
            raise
        if step % stride == 0 or step == n_steps:
            _check_finite(state, step)
            records.append(compute_diagnostics(params, state, op, horizon_fraction))
            if keep_snapshots:
                snapshots.append(state.copy())
    return state, records, snapshots


def first_horizon_violation(records) -> float:
    """Time of the first invalid sample, or +inf if none."""
    for rec in records:
        if not rec.valid:
            return rec.time
    return math.inf


def _drifts(records):
    valid = [r for r in records if r.valid] or records
    m0, e0 = valid[0].mass, valid[0].energy
    if m0 == 0:
        return 0.0, 0.0
    mdrift = max(abs(r.mass - m0) for r in valid) / m0
    edrift = max(abs(r.energy - e0) for r in valid) / e0 if e0 > 0 else 0.0
    return mdrift, edrift


# ---------------------------------------------------------------- scenarios

def _scenario_radial_global(man, thr, params, domain, op, cfg, state):
    state, records, _ = evolve(op, params, cfg, state, man.t_final,
                               man.sample_stride,
                               horizon_fraction=thr["horizon_mass_fraction"])
    mdrift, edrift = _drifts(records)
    verdicts = {
        "mass_conserved": mdrift < thr["mass_drift_max"],
        "energy_conserved": edrift < thr["energy_drift_max"],
    }
    h1_0 = records[0].sobolev[1]
    linf_sup = max(r.linf for r in records if r.valid) if any(r.valid for r in records) else 0.0
    strauss_vals = [r.strauss_ratio for r in records
                    if r.valid and math.isfinite(r.strauss_ratio)]
    extras = {
        "mass_drift": mdrift,
        "energy_drift": edrift,
        "uniform_bound_constant": linf_sup / h1_0 if h1_0 > 0 else 0.0,
        "strauss_constant": max(strauss_vals) if strauss_vals else math.nan,
    }
    return verdicts, extras, records


def _scenario_decay(man, thr, params, domain, op, cfg, state):
    zero_data = mass(state) == 0.0
    state, records, _ = evolve(op, params, cfg, state, man.t_final,
                               man.sample_stride,
                               horizon_fraction=thr["horizon_mass_fraction"])
    t_valid = first_horizon_violation(records)
    window = man.options.get("fit_window", [2.0, man.t_final])
    window = [window[0], min(window[1], t_valid)]
    if zero_data:
        return ({"decay_rate": True},
                {"fit_skipped": True, "reason": "zero initial data"}, records)
    valid = [r for r in records if r.valid]
    fit = decay_fit([r.time for r in valid], [r.sup_weighted_amp for r in valid],
                    window)
    verdicts = {"decay_rate": fit.exponent <= thr["decay_exponent_max"]}
    extras = {"decay_fit": fit.to_dict(), "fit_skipped": False,
              "t_valid": t_valid}
    return verdicts, extras, records


def _scenario_noninflation(man, thr, params, domain, op, cfg, state):
    orders = [int(k) for k in man.options.get("orders", [2])]
    split_time = float(man.options.get("split_time", 5.0))
    compat_info, refused = {}, []
    for k in orders:
        if k % 2 != 0:
            raise ValueError(f"non-inflation orders must be even, got {k}")
        N = k // 2
        if not params.p > 2 * N:
            refused.append(k)
            compat_info[str(k)] = {"refused": f"requires p > {2 * N}"}
            continue
        rep = nonlinear_compat_sequence(params, state, N)
        compat_info[str(k)] = rep.to_dict()
        if not rep.passed:
            refused.append(k)
    usable = [k for k in orders if k not in refused]
    state, records, _ = evolve(op, params, cfg, state, man.t_final,
                               man.sample_stride,
                               horizon_fraction=thr["horizon_mass_fraction"])
    ratios = noninflation_ratios(records, usable, split_time,
                                 thr["noninflation_ratio_max"])
    verdicts = {f"noninflation_h{k}": ratios[k]["pass"] for k in usable}
    for k in refused:
        verdicts[f"noninflation_h{k}"] = False
    extras = {"ratios": {str(k): v for k, v in ratios.items()},
              "compatibility": compat_info,
              "refused_orders": refused,
              "split_time": split_time}
    return verdicts, extras, records


def _build_perturbation(domain, params, descriptor, scale_order=None,
                        base_state=None, epsilon=1.0):
    """Perturbation field; epsilon is relative to |u0|_{H^{2m}} when a
    base state and scale order are given."""
    desc = dict(descriptor or {"profile": "gaussian_ring", "amplitude": 1.0,
                               "power": 2, "width": 4.0})
    angular_mode = int(desc.pop("angular_mode", 0))
    pert = make_initial_state(domain, desc)
    if angular_mode != 0:
        if domain.num_angular == 1:
            raise ValueError("angular perturbation needs an angular grid")
        shifted = np.zeros_like(pert.values)
        shifted[angular_mode % domain.num_angular, :] = pert.values[0, :]
        pert = FieldState(domain, 0.0, shifted, Representation.ANGULAR_MODES)
    if scale_order is not None and base_state is not None:
        base_norm = sobolev_norm(base_state, scale_order)
        pert_norm = sobolev_norm(pert, scale_order)
        if pert_norm > 0:
            pert.values *= epsilon * base_norm / pert_norm
    else:
        pert.values *= epsilon
    return pert


def _scenario_perturbed(man, thr, params, domain, op, cfg, state):
    if not params.p > params.n + 6:
        raise ValueError(f"perturbed scenario requires p > n + 6 = {params.n + 6}")
    epsilons = man.options.get("epsilons", [1e-1, 1e-2, 1e-3])
    scale_order = min(2 * params.m_smooth, 4)
    _, base_records, _ = evolve(op, params, cfg, state.copy(), man.t_final,
                                man.sample_stride,
                                horizon_fraction=thr["horizon_mass_fraction"])
    verdicts, sweep = {}, []
    for eps in epsilons:
        pert = _build_perturbation(domain, params, man.options.get("perturbation"),
                                   scale_order, state, eps)
        v0 = FieldState(domain, 0.0, state.values + pert.values, state.representation)
        w_budget = stability_energy(params, state, v0, op)
        try:
            _, recs, _ = evolve(op, params, cfg, v0, man.t_final,
                                man.sample_stride,
                                horizon_fraction=thr["horizon_mass_fraction"])
            mdrift, edrift = _drifts(recs)
            linf0 = recs[0].linf
            usable = [r.linf for r in recs if r.valid] or [r.linf for r in recs]
            linf_ratio = max(usable) / linf0 if linf0 > 0 else 0.0
            ok = mdrift < thr["mass_drift_max"]
            sweep.append({"epsilon": eps, "mass_drift": mdrift,
                          "energy_drift": edrift, "linf_ratio": linf_ratio,
                          "difference_energy_initial": w_budget.energy,
                          "difference_l2sq_initial": w_budget.l2_squared,
                          "anomaly": None})
        except RunAnomaly as exc:
            ok = False
            sweep.append({"epsilon": eps, "anomaly": str(exc)})
        verdicts[f"perturbed_eps_{eps:g}"] = ok
    extras = {"sweep": sweep, "scale_order": scale_order}
    return verdicts, extras, base_records


def _scenario_stability(man, thr, params, domain, op, cfg, state):
    epsilons = man.options.get("epsilons", [1e-1, 1e-2, 1e-3])
    stride = man.sample_stride
    u_state, base_records, u_snaps = evolve(
        op, params, cfg, state.copy(), man.t_final, stride,
        horizon_fraction=thr["horizon_mass_fraction"], keep_snapshots=True)
    verdicts, sweep = {}, []
    initial_energies = []
    for eps in epsilons:
        pert = _build_perturbation(domain, params, man.options.get("perturbation"),
                                   None, None, eps)
        v0 = FieldState(domain, 0.0, state.values + pert.values, state.representation)
        v_state, _, v_snaps = evolve(
            op, params, cfg, v0, man.t_final, stride,
            horizon_fraction=thr["horizon_mass_fraction"], keep_snapshots=True)
        times, energies = [], []
        for us, vs in zip(u_snaps, v_snaps):
            se = stability_energy(params, us, vs, op)
            times.append(us.time)
            energies.append(se.energy)
        budget = energies[0] + stability_energy(params, u_snaps[0], v_snaps[0], op).l2_squared
        fit = stability_fit(times, energies, budget,
                            thr["stability_log_curvature_tol"])
        verdicts[f"stability_eps_{eps:g}"] = fit["pass"]
        sweep.append({"epsilon": eps, "initial_energy": energies[0],
                      "budget": budget, **fit,
                      "energy_series": energies, "times": times})
        initial_energies.append(energies[0])
    eps_arr = np.asarray(epsilons, dtype=float)
    e_arr = np.asarray(initial_energies, dtype=float)
    if np.all(e_arr > 0) and len(e_arr) >= 2:
        slope, hw, rms = loglog_slope(eps_arr, e_arr)
        verdicts["epsilon_squared_scaling"] = abs(slope - 2.0) <= 0.1
        scaling = {"slope": slope, "halfwidth": hw, "residual": rms}
    else:
        verdicts["epsilon_squared_scaling"] = False
        scaling = {"slope": math.nan}
    extras = {"sweep": sweep, "scaling": scaling}
    return verdicts, extras, base_records


def _scenario_strichartz(man, thr, params, domain, op, cfg, state):
    pairs = man.options.get("pairs", [["inf", 2.0], [4.0, 3.0]])
    pairs = [(math.inf if q == "inf" else float(q), float(r)) for q, r in pairs]
    ensemble = int(man.options.get("ensemble_size", 20))
    resolutions = [int(m) for m in man.options.get("resolutions",
                                                   [man.num_radial])]
    mode_count = int(man.options.get("mode_count", 8))
    for q, r in pairs:
        ok, endpoint = check_admissible(params.n, q, r)
        if not ok or endpoint:
            raise ValueError(f"pair (q={q}, r={r}) is inadmissible or endpoint")

    table = {}
    for q, r in pairs:
        table[f"({q:g},{r:g})"] = {"resolutions": {}}
    for num_radial in resolutions:
        dom = build_domain(params, num_radial)
        opr = LaplacianOp(dom)
        quotients = {f"({q:g},{r:g})": [] for q, r in pairs}
        for seed in range(ensemble):
            u0 = eigenmode_sum(dom, seed + man.seed, mode_count)
            l2_0 = math.sqrt(mass(u0))
            n_steps = max(1, round(man.t_final / man.dt))
            times = [0.0]
            norms = {key: [_lp_norm(u0, rr)] for (qq, rr), key in
                     zip(pairs, quotients)}
            st = u0
            for step in range(1, n_steps + 1):
                st = linear_step(opr, cfg, st)
                times.append(st.time)
                for (qq, rr), key in zip(pairs, quotients):
                    norms[key].append(_lp_norm(st, rr))
            for (qq, rr), key in zip(pairs, quotients):
                series = np.asarray(norms[key])
                if math.isinf(qq):
                    val = float(np.max(series))
                else:
                    val = float(np.trapezoid(series ** qq, np.asarray(times))
                                ** (1.0 / qq))
                quotients[key].append(val / l2_0)
        for key, vals in quotients.items():
            arr = np.asarray(vals)
            table[key]["resolutions"][str(num_radial)] = {
                "max": float(np.max(arr)), "median": float(np.median(arr)),
            }
    verdicts = {}
    for key, info in table.items():
        maxima = [v["max"] for v in info["resolutions"].values()]
        variation = max(maxima) / min(maxima) if min(maxima) > 0 else math.inf
        info["variation"] = variation
        verdicts[f"strichartz_{key}"] = variation < thr["strichartz_variation_max"]
    records = [compute_diagnostics(params, state, op,
                                   thr["horizon_mass_fraction"])]
    extras = {"table": table, "ensemble_size": ensemble,
              "resolutions": resolutions}
    return verdicts, extras, records


def _scenario_compat(man, thr, params, domain, op, cfg, state):
    order = int(man.options.get("order", params.m_smooth))
    kind = man.options.get("kind", "nonlinear")
    if kind == "nonlinear":
        rep = nonlinear_compat_sequence(params, state, order)
    elif kind == "linear":
        rep = linear_compat_sequence(state, None, order)
    else:
        raise ValueError(f"unknown compatibility kind '{kind}'")
    records = [compute_diagnostics(params, state, op,
                                   thr["horizon_mass_fraction"])]
    return {"compatibility": rep.passed}, {"compat_report": rep.to_dict(),
                                           "kind": kind}, records


def _evolve_difference_directly(op, params, dt, t_final, u0, w0):
    """March the difference equation i w_t + Lap w = f(u+w) - f(u) with
    the exact (V1, V2) linearization frozen at the step midpoint and the
    remainder applied as forcing; u is co-evolved in half steps."""
    cfg_half = PropagatorConfig(dt=dt / 2.0)
    cfg = PropagatorConfig(dt=dt)
    u = u0.copy()
    w = w0.copy()
    n_steps = max(1, round(t_final / dt))
    p = params.p

    def f(z):
        return np.abs(z) ** (p - 1.0) * z

    for _ in range(n_steps):
        u_mid = strang_step(op, params, cfg_half, u)
        um = u_mid.values
        absum = np.abs(um)
        v1 = FieldState(u0.domain, w.time, (p + 1.0) / 2.0 * absum ** (p - 1.0))
        v2_vals = np.zeros_like(um)
        nz = absum > 0
        v2_vals[nz] = (p - 1.0) / 2.0 * absum[nz] ** (p - 3.0) * um[nz] ** 2
        v2 = FieldState(u0.domain, w.time, v2_vals)
        remainder = (f(um + w.values) - f(um)
                     - v1.values * w.values - v2.values * np.conj(w.values))
        forcing = FieldState(u0.domain, w.time, remainder)
        w = perturbed_step(op, cfg, w, v1, v2, forcing)
        u = strang_step(op, params, cfg_half, u_mid)
    return u, w


def _scenario_wconsistency(man, thr, params, domain, op, cfg, state):
    eps = float(man.options.get("epsilon", 1e-2))
    dt_levels = [float(x) for x in man.options.get(
        "dt_levels", [man.dt, man.dt / 2.0, man.dt / 4.0])]
    pert = _build_perturbation(domain, params, man.options.get("perturbation"),
                               None, None, eps)
    errors = []
    for dt in dt_levels:
        cfg_l = PropagatorConfig(dt=dt)
        u = state.copy()
        v = FieldState(domain, 0.0, state.values + pert.values,
                       state.representation)
        n_steps = max(1, round(man.t_final / dt))
        for _ in range(n_steps):
            u = strang_step(op, params, cfg_l, u)
            v = strang_step(op, params, cfg_l, v)
        w_indirect = FieldState(domain, u.time, v.values - u.values)
        _, w_direct = _evolve_difference_directly(op, params, dt, man.t_final,
                                                  state, pert)
        diff = FieldState(domain, u.time, w_direct.values - w_indirect.values)
        ref = math.sqrt(mass(w_indirect))
        errors.append(math.sqrt(mass(diff)) / ref if ref > 0 else 0.0)
    orders = [math.log2(errors[i] / errors[i + 1])
              for i in range(len(errors) - 1)
              if errors[i + 1] > 0]
    verdicts = {"w_consistency_order": bool(orders) and min(orders) >= 1.0}
    extras = {"dt_levels": dt_levels, "relative_errors": errors,
              "orders": orders, "epsilon": eps}
    records = [compute_diagnostics(params, state, op,
                                   thr["horizon_mass_fraction"])]
    return verdicts, extras, records


_SCENARIO_FUNCS = {
    "RadialGlobal": _scenario_radial_global,
    "DecayRate": _scenario_decay,
    "NonInflation": _scenario_noninflation,
    "Perturbed": _scenario_perturbed,
    "Stability": _scenario_stability,
    "LinearStrichartz": _scenario_strichartz,
    "CompatCheck": _scenario_compat,
    "WConsistency": _scenario_wconsistency,
}


def run_scenario(man: RunManifest, output_dir=None) -> RunResult:
    """Execute one manifest; write diagnostics.csv and report.json when an
    output directory is configured.  Exit code 0: all verdicts pass,
    2: at least one fail, 3: runtime anomaly."""
    thr = man.effective_thresholds
    params, domain, op, cfg, state = _setup(man)
    out_dir = Path(output_dir) if output_dir else (
        Path(man.output_dir) if man.output_dir else None)

    anomaly = None
    try:
        verdicts, extras, records = _SCENARIO_FUNCS[man.scenario](
            man, thr, params, domain, op, cfg, state)
        exit_code = 0 if all(verdicts.values()) else 2
    except RunAnomaly as exc:
        anomaly = {"step": exc.step, "time": exc.time, "message": str(exc)}
        verdicts, extras, records = {}, {}, []
        exit_code = 3

    report = _sanitize({
        "manifest": man.to_dict(),
        "verdicts": verdicts,
        "extras": extras,
        "anomaly": anomaly,
        "t_valid": first_horizon_violation(records),
        "thresholds": thr,
        "environment": _environment_stamp(),
        "exit_code": exit_code,
    })
    csv_path = report_path = ""
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = str(out_dir / "diagnostics.csv")
        report_path = str(out_dir / "report.json")
        write_csv(csv_path, records)
        Path(report_path).write_text(
            json.dumps(report, indent=2, sort_keys=True, default=_json_default)
            + "\n")
    return RunResult(manifest=man, records=records, report=report,
                     exit_code=exit_code, csv_path=csv_path,
                     report_path=report_path)


def _sanitize(obj):
    """Strict-JSON form: numpy scalars to python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        val = float(obj)
        return val if math.isfinite(val) else None
    return obj


def _json_default(obj):
    raise TypeError(f"not JSON serializable: {type(obj)}")
