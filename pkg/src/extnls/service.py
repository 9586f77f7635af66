"""HTTP service exposing the lab: admissibility queries, compatibility
checks, and manifest-driven runs with retrievable reports."""

from __future__ import annotations

import json
import tempfile
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .domain import ModelParams, build_domain
from .compat import linear_compat_sequence, nonlinear_compat_sequence
from .functionals import check_admissible
from .profiles import make_initial_state
from .experiments import RunManifest, ManifestError, run_scenario

app = FastAPI(title="extnls", version=__version__)

_RUNS_ROOT = Path(tempfile.gettempdir()) / "extnls-runs"


class CompatRequest(BaseModel):
    n: int
    p: float
    r_max: float
    num_radial: int
    num_angular: int = 1
    initial_data: dict
    order: int | None = None
    kind: str = Field(default="nonlinear", pattern="^(nonlinear|linear)$")


class RunRequest(BaseModel):
    manifest: dict


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.get("/admissible")
def admissible(n: int, q: float, r: float):
    ok, endpoint = check_admissible(n, q, r)
    return {"n": n, "q": q, "r": r, "admissible": ok, "endpoint": endpoint}


@app.post("/compat")
def compat(req: CompatRequest):
    try:
        params = ModelParams(n=req.n, p=req.p, r_max=req.r_max)
        domain = build_domain(params, req.num_radial, req.num_angular)
        state = make_initial_state(domain, req.initial_data)
        order = req.order if req.order is not None else params.m_smooth
        if req.kind == "nonlinear":
            rep = nonlinear_compat_sequence(params, state, order)
        else:
            rep = linear_compat_sequence(state, None, order)
    except (ValueError, KeyError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return rep.to_dict()


@app.post("/runs", status_code=201)
def create_run(req: RunRequest):
    try:
        man = RunManifest.from_dict(req.manifest)
    except ManifestError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    run_id = uuid.uuid4().hex[:12]
    out_dir = _RUNS_ROOT / run_id
    result = run_scenario(man, output_dir=out_dir)
    return {"run_id": run_id, "exit_code": result.exit_code,
            "verdicts": result.report["verdicts"]}


def _run_dir(run_id: str) -> Path:
    out_dir = _RUNS_ROOT / run_id
    if not out_dir.is_dir():
        raise HTTPException(status_code=404, detail=f"no run '{run_id}'")
    return out_dir


@app.get("/runs/{run_id}/report")
def get_report(run_id: str):
    path = _run_dir(run_id) / "report.json"
    return json.loads(path.read_text())


@app.get("/runs/{run_id}/diagnostics")
def get_diagnostics(run_id: str):
    path = _run_dir(run_id) / "diagnostics.csv"
    header, *rows = path.read_text().strip().split("\n")
    columns = header.split(",")
    return {"columns": columns,
            "rows": [[float(x) for x in row.split(",")] for row in rows]}
