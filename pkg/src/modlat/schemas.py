"""Pydantic request/response models for the HTTP service and CLI client.

All numeric payload values are serialized as decimal strings (full repr
precision) to avoid float round-trip ambiguity across clients.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field


def dec(x) -> str | None:
    """Decimal-string encoding of a float (None passes through)."""
    if x is None:
        return None
    return repr(float(x))


def deep_dec(obj: Any) -> Any:
    """Recursively encode every float in a JSON-like structure as a string."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return dec(obj)
    if isinstance(obj, dict):
        return {k: deep_dec(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [deep_dec(v) for v in obj]
    return obj


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# -- requests ---------------------------------------------------------------

class BoundRequest(StrictModel):
    m: int = Field(ge=1)
    t: int = Field(ge=2)
    mode: Literal["explicit", "asymptotic"] = "explicit"
    h0: float | None = None
    k_grid: list[float] | None = None
    constants_mode: Literal["uniform_cyclotomic", "voutier_generic", "user"] = \
        "uniform_cyclotomic"
    c: float | None = None
    c_o: float | None = None
    c_s: float | None = None
    card_s: int | None = None
    rank_ratio: float | None = None


class SVBoundRequest(StrictModel):
    m: int = Field(ge=1)
    t: int = Field(ge=2)
    epsilon: float | None = None     # None = auto: 1/ln(n)
    mode: Literal["explicit", "asymptotic"] = "explicit"
    h0: float | None = None


class ZetaRequest(StrictModel):
    m: int = Field(ge=1)
    s: float
    tol: float = 1e-10


class EnumerateRequest(StrictModel):
    m: int = Field(ge=1)
    X: float = Field(gt=0, le=2)


class SimulateRequest(StrictModel):
    m: int = Field(ge=1)
    t: int = Field(ge=2)
    p: int
    s: int = Field(ge=1)
    V: float = Field(gt=0)
    N: int = Field(ge=1)
    seed: int = 0
    epsilon: float = 0.15


class FigureRequest(StrictModel):
    conductors: list[int] = [8, 10, 12, 13, 15, 16]
    t_min: int = 15
    t_max: int = 32
    height_cutoff: float = 100.0


# -- responses --------------------------------------------------------------

class ServiceMeta(StrictModel):
    version: str
    config: dict


class ErrorBody(StrictModel):
    error_kind: Literal["rank_below_threshold", "enumeration_unavailable",
                        "precision_failure", "invalid_request"]
    detail: str


class BoundResponse(StrictModel):
    meta: ServiceMeta
    eta_upper: str
    mode: str
    breakdown: dict


class SVBoundResponse(StrictModel):
    meta: ServiceMeta
    eta_upper: str
    bracket: dict
    module_prediction: dict


class ZetaResponse(StrictModel):
    meta: ServiceMeta
    s: str
    lower: str
    upper: str
    width: str
    prime_cutoff: int


class EnumerateResponse(StrictModel):
    meta: ServiceMeta
    n_orbits: int
    orbits: list[dict]


class SimulateResponse(StrictModel):
    meta: ServiceMeta
    report: dict


class FigureResponse(StrictModel):
    meta: ServiceMeta
    rows: list[dict]
    csv: str
