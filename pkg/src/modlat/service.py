"""FastAPI service exposing the bound/enumeration/simulation pipeline.

The CLI talks to this app in-process by default (ASGI transport) or to a
remote instance over HTTP; both paths serve identical JSON, with all numeric
values as decimal strings and the resolved configuration echoed back.
"""

from __future__ import annotations

import math

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from . import __version__
from . import bounds as B
from .fieldcore import FieldError, make_field
from .heights import (EnumerationUnavailable, records_as_json, setup_constants)
from .latsim import SimError, run_experiment
from .schemas import (BoundRequest, BoundResponse, EnumerateRequest,
                      EnumerateResponse, ErrorBody, FigureRequest,
                      FigureResponse, ServiceMeta, SimulateRequest,
                      SimulateResponse, SVBoundRequest, SVBoundResponse,
                      ZetaRequest, ZetaResponse, dec, deep_dec)
from .svpredict import module_prediction, sv_bracket
from .zeta import ZetaError, dedekind_zeta

app = FastAPI(title="modlat", version=__version__)


def _meta(req) -> ServiceMeta:
    return ServiceMeta(version=__version__, config=deep_dec(req.model_dump()))


def _error(status: int, kind: str, detail: str) -> JSONResponse:
    body = ErrorBody(error_kind=kind, detail=detail)
    return JSONResponse(status_code=status, content=body.model_dump())


def _classify(exc: Exception) -> JSONResponse:
    if isinstance(exc, EnumerationUnavailable):
        return _error(422, "enumeration_unavailable", str(exc))
    if isinstance(exc, (B.BoundError, SimError, FieldError)) and \
            "does not exceed" in str(exc):
        return _error(409, "rank_below_threshold", str(exc))
    if isinstance(exc, ZetaError):
        return _error(422, "precision_failure", str(exc))
    return _error(400, "invalid_request", str(exc))


def _bound_params(req: BoundRequest) -> B.BoundParams:
    fld = make_field(req.m)
    consts = setup_constants(fld, req.constants_mode, c=req.c, c_o=req.c_o,
                             c_s=req.c_s, card_s=req.card_s)
    kwargs = {}
    if req.k_grid:
        kwargs["k"] = tuple(req.k_grid)
    return B.BoundParams(field=fld, t=req.t, constants=consts, h0=req.h0,
                         rank_ratio=req.rank_ratio, **kwargs)


@app.post("/bound", response_model=BoundResponse,
          responses={400: {"model": ErrorBody}, 409: {"model": ErrorBody},
                     422: {"model": ErrorBody}})
def bound(req: BoundRequest):
    try:
        params = _bound_params(req)
        if req.mode == "explicit":
            if req.h0 is None:
                fld = params.field
                params = B.BoundParams(field=fld, t=req.t, constants=params.constants,
                                       k=params.k, h0=math.log(100.0) / fld.d,
                                       rank_ratio=req.rank_ratio)
            report = B.eta_explicit(params)
        else:
            report = B.eta_asymptotic(params)
    except (FieldError, B.BoundError, ZetaError, ValueError) as exc:
        return _classify(exc)
    return BoundResponse(meta=_meta(req), eta_upper=dec(report.eta_upper),
                         mode=report.mode, breakdown=deep_dec(report.breakdown))


@app.post("/svbound", response_model=SVBoundResponse,
          responses={400: {"model": ErrorBody}, 409: {"model": ErrorBody},
                     422: {"model": ErrorBody}})
def svbound(req: SVBoundRequest):
    try:
        fld = make_field(req.m)
        n = req.t * fld.d
        eps = req.epsilon if req.epsilon is not None else 1.0 / math.log(n)
        consts = setup_constants(fld, "uniform_cyclotomic")
        h0 = req.h0 if req.h0 is not None else \
            min(2.0, max(consts.c_s, math.log(100.0) / fld.d))
        params = B.BoundParams(field=fld, t=req.t, constants=consts,
                               h0=h0 if req.mode == "explicit" else None)
        report = (B.eta_explicit(params) if req.mode == "explicit"
                  else B.eta_asymptotic(params))
        bracket = sv_bracket(fld, req.t, fld.omega * report.eta_upper, eps)
        pred = module_prediction(fld, req.t)
    except (FieldError, B.BoundError, ZetaError, ValueError) as exc:
        return _classify(exc)
    return SVBoundResponse(meta=_meta(req), eta_upper=dec(report.eta_upper),
                           bracket=deep_dec(bracket.as_json()),
                           module_prediction=deep_dec(pred.as_json()))


@app.post("/zeta", response_model=ZetaResponse,
          responses={400: {"model": ErrorBody}, 422: {"model": ErrorBody}})
def zeta(req: ZetaRequest):
    try:
        val = dedekind_zeta(make_field(req.m), req.s, tol=req.tol)
    except (FieldError, ZetaError, ValueError) as exc:
        return _classify(exc)
    return ZetaResponse(meta=_meta(req), s=dec(val.s), lower=dec(val.lower),
                        upper=dec(val.upper), width=dec(val.width),
                        prime_cutoff=val.prime_cutoff)


@app.post("/enumerate", response_model=EnumerateResponse,
          responses={400: {"model": ErrorBody}, 422: {"model": ErrorBody}})
def enumerate_heights(req: EnumerateRequest):
    try:
        records = B.cached_enumeration(make_field(req.m), req.X)
    except (FieldError, ValueError) as exc:
        return _classify(exc)
    return EnumerateResponse(meta=_meta(req), n_orbits=len(records),
                             orbits=deep_dec(records_as_json(records)))


@app.post("/simulate", response_model=SimulateResponse,
          responses={400: {"model": ErrorBody}, 422: {"model": ErrorBody}})
def simulate(req: SimulateRequest):
    try:
        report = run_experiment(m=req.m, t=req.t, p=req.p, s=req.s, V=req.V,
                                N=req.N, master_seed=req.seed,
                                epsilon=req.epsilon)
    except (FieldError, SimError, ValueError) as exc:
        return _classify(exc)
    return SimulateResponse(meta=_meta(req), report=deep_dec(report.as_json()))


@app.post("/figure", response_model=FigureResponse,
          responses={400: {"model": ErrorBody}})
def figure(req: FigureRequest):
    try:
        rows = B.figure_data(conductors=tuple(req.conductors),
                             t_values=tuple(range(req.t_min, req.t_max + 1)),
                             height_cutoff=req.height_cutoff)
        csv = B.figure_csv(rows)
    except (FieldError, ValueError) as exc:
        return _classify(exc)
    return FigureResponse(
        meta=_meta(req),
        rows=[{"m": m, "t": t, "ln_eta_upper": dec(v)} for m, t, v in rows],
        csv=csv)
