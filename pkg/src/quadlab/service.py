"""HTTP service exposing the library (``uvicorn quadlab.service:app``)."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .allocation import BudgetExceeded, conditioned_allocation_exact, prob_sum_equals, sample_conditioned
from .continuum import InconsistentSide, TieDetected, root_profile, sample_object
from .decomposition import decompose
from .enumeration import (
    BadAllocation,
    CapExceeded,
    Family,
    FamilySpec,
    RootBlockTooSmall,
    count_quadrangulations,
    enumerate_family,
)
from .experiments import ExperimentConfig, run
from .metric import CapExceeded as GHPCapExceeded
from .metric import InvalidPartition, InvalidSpace, PointedSpace, ghp_local, ghp_pointed
from .planar_map import MapError, from_qnd, to_qnd
from .samplers import Timeout, sample_fixed_block, sample_conditioned_root_block, sample_uniform_quadrangulation, spawn
from .schemas import (
    AllocateRequest,
    AllocateResponse,
    ContinuumRequest,
    ContinuumResponse,
    DecomposeRequest,
    DecomposeResponse,
    EnumerateRequest,
    EnumerateResponse,
    ExperimentRequest,
    GHPRequest,
    GHPResponse,
    SampleRequest,
    SampleResponse,
    Space,
)

app = FastAPI(title="quadlab", version=__version__)

_CLIENT_ERRORS = (
    BadAllocation,
    BudgetExceeded,
    CapExceeded,
    GHPCapExceeded,
    InconsistentSide,
    InvalidPartition,
    InvalidSpace,
    MapError,
    RootBlockTooSmall,
    TieDetected,
    Timeout,
    ValueError,
)


@app.exception_handler(Exception)
async def _errors(request: Request, exc: Exception):
    status = 422 if isinstance(exc, _CLIENT_ERRORS) else 500
    return JSONResponse(status_code=status, content={"error": type(exc).__name__, "message": str(exc)})


def _map_json(m) -> dict:
    return {"rot": m.rot.tolist(), "org": m.org.tolist(), "root": int(m.root), "n_vertices": m.n_vertices}


def _spec(n: int, r: int | None, faces: int | None) -> FamilySpec:
    if r is None:
        if faces is not None:
            raise ValueError("--faces needs --r")
        return FamilySpec(Family.all_quadrangulations, n)
    if faces is None:
        return FamilySpec(Family.fixed_root_block_size, n, r)
    return FamilySpec(Family.fixed_root_block_and_faces, n, r, faces)


def space_from_model(s: Space) -> PointedSpace:
    return PointedSpace.from_json(s.model_dump())


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/enumerate", response_model=EnumerateResponse)
def enumerate_endpoint(req: EnumerateRequest) -> EnumerateResponse:
    spec = _spec(req.n, req.r, req.faces)
    maps = list(enumerate_family(spec))
    out = EnumerateResponse(n=req.n, r=req.r, faces=req.faces, count=len(maps))
    if req.r is None:
        out.closed_form = count_quadrangulations(req.n)
    if req.emit == "maps":
        out.maps = [to_qnd(m) for m in maps] if req.format == "qnd" else [_map_json(m) for m in maps]
    return out


@app.post("/decompose", response_model=DecomposeResponse)
def decompose_endpoint(req: DecomposeRequest) -> DecomposeResponse:
    return DecomposeResponse(records=[decompose(from_qnd(line)).to_record(req.diameters) for line in req.maps])


@app.post("/allocate", response_model=AllocateResponse)
def allocate_endpoint(req: AllocateRequest) -> AllocateResponse:
    m, N = req.balls, req.boxes
    if not 1 <= N <= m:
        raise ValueError("need balls >= boxes >= 1")
    if req.mode == "exact":
        law = conditioned_allocation_exact(m, N)
        return AllocateResponse(
            balls=m,
            boxes=N,
            mode="exact",
            prob_sum=str(prob_sum_equals(N, m)),
            law=[{"y": list(y), "p": str(p)} for y, p in law.items()],
            summary={"support": len(law)},
        )
    ys = sample_conditioned(m, N, seed=req.seed, reps=req.reps, strategy=req.strategy)
    srt = -np.sort(-ys, axis=1)
    return AllocateResponse(
        balls=m,
        boxes=N,
        mode="mc",
        samples=ys.tolist(),
        summary={"mean_largest": float(srt[:, 0].mean()), "mean_second": float(srt[:, 1].mean()) if N > 1 else 0.0},
    )


@app.post("/sample", response_model=SampleResponse)
def sample_endpoint(req: SampleRequest) -> SampleResponse:
    out = []
    for ss in spawn(req.seed, req.reps):
        rng = np.random.default_rng(ss)
        if req.r is None:
            if req.faces is not None:
                raise ValueError("--faces needs --r")
            q = sample_uniform_quadrangulation(req.n, rng)
        elif req.faces is None:
            q = sample_conditioned_root_block(req.n, req.r, rng)
        else:
            q = sample_fixed_block(req.n, req.r, req.faces, rng)
        out.append(to_qnd(q))
    return SampleResponse(maps=out)


def _num(v):
    return str(v) if isinstance(v, Fraction) else float(v)


@app.post("/ghp", response_model=GHPResponse)
def ghp_endpoint(req: GHPRequest) -> GHPResponse:
    a, b = space_from_model(req.a), space_from_model(req.b)
    if req.local:
        iv = ghp_local(a, b, req.terms)
        return GHPResponse(mode="local", lo=float(iv.lo), hi=float(iv.hi))
    if req.mode == "exact":
        return GHPResponse(mode="exact", value=_num(ghp_pointed(a, b, "exact")))
    iv = ghp_pointed(a, b, "bounds")
    return GHPResponse(mode="bounds", lo=float(iv.lo), hi=float(iv.hi))


@app.post("/continuum", response_model=ContinuumResponse)
def continuum_endpoint(req: ContinuumRequest) -> ContinuumResponse:
    g = sample_object(req.object, req.grid, req.lam, req.window, req.seed)
    s = g.space()
    diag = {"points": g.n_points, "total_mass": float(g.mass.sum()), "root_closure_gain": g.root_closure_gain()}
    if req.emit == "profile":
        prof = root_profile(s, req.radii)
        return ContinuumResponse(object=req.object, profile=[{"radius": r, "mass": v} for r, v in zip(req.radii, prof)], diagnostics=diag)
    return ContinuumResponse(object=req.object, space=Space(**s.to_json()), diagnostics=diag)


@app.post("/experiment")
def experiment_endpoint(req: ExperimentRequest) -> dict:
    from .experiments import _clean

    cfg = ExperimentConfig.from_dict({**req.config, "name": req.name})
    return _clean(run(cfg))
