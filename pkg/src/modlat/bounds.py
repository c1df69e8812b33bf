"""Certified upper bounds on the normalized second-moment error eta.

For a Haar-random rank-t module lattice over O_K and an origin-centered ball
of volume V, the second moment of the point count rho satisfies

    V^2 + omega*V  <=  E[rho^2]  <=  V^2 + omega*V*(1 + omega*eta)

and this module computes certified upper bounds for eta by two routes:

  * eta_asymptotic: #S_K * C * Z(K,t,k) * e^{-eps*d*(t-t0)} with the zeta
    ratio Z and explicit constants, minimized over a grid of k.
  * eta_explicit: exact low-height orbit sum (one term per mu(K)-orbit with
    h <= h0, inverses counted) plus an analytic tail for h > h0.

All bound-relevant roundings are outward (upward for error terms): float64
sums are inflated by a blanket 1e-9 relative margin, far above the actual
pairwise-summation error at these sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .fieldcore import CyclotomicField, FieldError
from .heights import (OrbitRecord, SetupConstants, enumerate_bounded_height,
                      setup_constants)
from .zeta import ZetaError, dedekind_zeta, dedekind_zeta_loose, zeta_ratio

DEFAULT_K_GRID = (2.0, 2.5, 3.0, 4.0, 6.0, 8.0, 10.99, 16.0)
_SUM_SLACK = 1e-9   # relative outward inflation of float64 sums/products


class BoundError(ValueError):
    pass


@dataclass(frozen=True)
class BoundParams:
    field: CyclotomicField
    t: int
    constants: SetupConstants
    k: float | tuple[float, ...] = DEFAULT_K_GRID
    h0: float | None = None        # height cutoff, explicit mode
    A: float | None = None         # interval count; defaults to k^3
    rank_ratio: float | None = None  # override of r_K/d (e.g. 1/2 asymptotics)

    def __post_init__(self):
        c, c_o, c_s, _ = self.constants
        if not (0 < c <= c_o <= c_s):
            raise BoundError(f"need 0 < c <= c_o <= c_S, got ({c}, {c_o}, {c_s})")
        if self.t < 2:
            raise BoundError("rank t must be at least 2")

    @property
    def k_grid(self) -> tuple[float, ...]:
        return (self.k,) if isinstance(self.k, (int, float)) else tuple(self.k)

    def unit_rank_ratio(self) -> float:
        if self.rank_ratio is not None:
            return self.rank_ratio
        return self.field.unit_rank / self.field.d


@dataclass(frozen=True)
class BoundReport:
    eta_upper: float
    mode: str
    breakdown: dict

    def __post_init__(self):
        if self.eta_upper < 0:
            raise BoundError("negative eta bound")

    def as_json(self) -> dict:
        return {"eta_upper": self.eta_upper, "mode": self.mode,
                "breakdown": self.breakdown}


# ---------------------------------------------------------------------------
# Volume-ratio and unit-count bounds
# ---------------------------------------------------------------------------

def volume_ratio_bound(h_inf: float, norm_abs: float, d: int, t: float,
                       k: float) -> float:
    """Upper bound for vol(B cap alpha^{-1}B)/vol(B), in (0, 1].

    Two closed forms; the second trades norm decay against height decay and
    is valid only for |N(alpha)| >= 1. Returns the smaller admissible one.
    """
    if k < 2:
        raise BoundError(f"free parameter k must be >= 2, got {k}")
    if h_inf < 0 or t < 1 or norm_abs <= 0:
        raise BoundError("need h_inf >= 0, t >= 1, norm > 0")
    log_n = math.log(norm_abs)
    exponent = -d * t / 2.0

    def log_form(h_scale: float) -> float:
        # ln((e^{2h s} + e^{-2h s} N^{2/d}) / 2) evaluated stably
        a = 2.0 * h_inf * h_scale
        b = -2.0 * h_inf * h_scale + 2.0 * log_n / d
        top = max(a, b)
        return top + math.log((math.exp(a - top) + math.exp(b - top)) / 2.0)

    best = exponent * log_form(1.0)
    if norm_abs >= 1:
        form2 = -t * log_n / k + exponent * log_form((k - 1.0) / k)
        best = min(best, form2)
    return min(math.exp(best) * (1.0 + _SUM_SLACK), 1.0)


def unit_count_bound(X: float, c_s: float, r: int, card_s: int) -> float:
    """Bound on #{units u : shifted height <= X}: cardS*((X+c_S/2)/(c_S/2))^r."""
    if c_s <= 0:
        raise BoundError("c_S must be positive")
    if X < 0:
        raise BoundError("X must be nonnegative")
    return card_s * ((X + c_s / 2.0) / (c_s / 2.0)) ** r


# ---------------------------------------------------------------------------
# Threshold ranks and explicit constants
# ---------------------------------------------------------------------------

def t0_and_constants(params: BoundParams, mode: str,
                     k: float | None = None) -> tuple[float, float, float]:
    """(t0, epsilon, C) for the requested proposition mode.

    Modes: 'coset' (unit-coset sums, any k >= 2), 'ideal_sum' (full orbit sum,
    k >= 3, t0 also at least max(k, 6), C doubled), 'tail' (heights above h0,
    fixed k = 4). Outward rounding: t0 up, epsilon down, C up.
    """
    _, c_o, c_s, _ = params.constants
    d = params.field.d
    t = params.t
    ratio = params.unit_rank_ratio()
    up = 1.0 + 1e-12

    if mode in ("coset", "ideal_sum"):
        kk = params.k_grid[0] if k is None else k
        if kk < 2 or (mode == "ideal_sum" and kk < 3):
            raise BoundError(f"k = {kk} inadmissible for mode {mode}")
        denom = math.log(math.cosh(2.0 * c_o * (1.0 - 1.0 / kk)))
        base = (2.0 * ratio) * math.log(1.0 + 2.0 * c_o / c_s + kk ** -3) / denom
        t0 = base * up if mode == "coset" else max(kk, 6.0, base * up)
        eps = (5.0 * c_o ** 2 * (kk - 1.0) ** 2) / (6.0 * kk ** 2) / up
        if t <= t0:
            raise BoundError(f"rank t = {t} does not exceed t0 = {t0:.6f}")
        decay = 5.0 * c_o ** 2 * d * (t - t0) * (kk - 1.0) ** 2 / (3.0 * kk ** 5)
        cc = 1.0 + kk ** 3 + 1.0 / (1.0 - math.exp(-decay))
        if mode == "ideal_sum":
            cc *= 2.0
        return t0, eps, cc * up

    if mode == "tail":
        h0 = params.h0
        if h0 is None or not (c_s <= h0 <= 2.0):
            raise BoundError(f"tail mode needs c_S <= h0 <= 2, got {h0}")
        lch = math.log(math.cosh(1.5 * h0))
        t0 = max(4.0, (2.0 * ratio) * math.log(1.0 + (12.0 * h0 + 1.0) / (6.0 * c_s)) / lch * up)
        eps = 0.5 * lch / up
        if t <= t0:
            raise BoundError(f"rank t = {t} does not exceed tail t0 = {t0:.6f}")
        cc = 1.0 + 2.0 / (1.0 - math.exp(-5.0 * d * (t - t0) / 192.0))
        return t0, eps, cc * up

    raise BoundError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Asymptotic route
# ---------------------------------------------------------------------------

def eta_asymptotic(params: BoundParams) -> BoundReport:
    """min over the k-grid of #S_K * C * Z(K,t,k) * e^{-eps*d*(t-t0)}."""
    fld, t = params.field, params.t
    card_s = params.constants.card_s
    d = fld.d
    best = None
    attempts = []
    for k in params.k_grid:
        if k < 3:
            attempts.append({"k": k, "status": "skipped (k < 3)"})
            continue
        args_ok = t * (0.5 - 1.0 / k) > 1 and t / k > 1 and t / 2 > 1
        if not args_ok:
            attempts.append({"k": k, "status": "skipped (zeta argument <= 1)"})
            continue
        try:
            t0, eps, cc = t0_and_constants(params, "ideal_sum", k=k)
            z_lo, z_hi = zeta_ratio(fld, t, k)
        except (BoundError, ZetaError) as exc:
            attempts.append({"k": k, "status": f"skipped ({exc})"})
            continue
        eta = card_s * cc * z_hi * math.exp(-eps * d * (t - t0)) * (1 + _SUM_SLACK)
        attempts.append({"k": k, "status": "ok", "eta": eta, "t0": t0,
                         "epsilon": eps, "C": cc, "zeta_ratio_upper": z_hi})
        if best is None or eta < best["eta"]:
            best = attempts[-1]
    if best is None:
        raise BoundError(
            f"rank t = {t} does not exceed the threshold t0 for any k in "
            f"{params.k_grid}")
    return BoundReport(
        eta_upper=best["eta"], mode="asymptotic",
        breakdown={"k_star": best["k"], "t0": best["t0"], "epsilon": best["epsilon"],
                   "C": best["C"], "zeta_ratio": best["zeta_ratio_upper"],
                   "card_s": card_s, "grid": attempts})


# ---------------------------------------------------------------------------
# Explicit route: low-height orbit sum plus tail
# ---------------------------------------------------------------------------

def _record_arrays(records: list[OrbitRecord], h0: float):
    h_inf = []
    log_n = []
    log_d = []
    for rec in records:
        if rec.profile.h_weil > h0:
            continue
        h_inf.append(rec.profile.h_inf)
        log_n.append(math.log(rec.profile.norm_abs))
        log_d.append(rec.profile.log_D)
    return (np.array(h_inf), np.array(log_n), np.array(log_d))


def explicit_orbit_sum(records: list[OrbitRecord], h0: float, d: int, t: float,
                       k_grid=DEFAULT_K_GRID) -> float:
    """sum over orbits with h <= h0 of D^{-t} * volume-ratio bound, vectorized.

    Per-orbit minimum over the k-grid (second form only where |N| >= 1);
    result inflated outward by the blanket summation slack.
    """
    h_inf, log_n, log_d = _record_arrays(records, h0)
    if h_inf.size == 0:
        return 0.0
    exponent = -d * t / 2.0

    def log_form(scale: np.ndarray | float) -> np.ndarray:
        a = 2.0 * h_inf * scale
        b = -2.0 * h_inf * scale + 2.0 * log_n / d
        top = np.maximum(a, b)
        return top + np.log((np.exp(a - top) + np.exp(b - top)) / 2.0)

    best = exponent * log_form(1.0)
    pos = log_n >= 0
    for k in k_grid:
        if k < 2:
            continue
        form2 = -t * log_n / k + exponent * log_form((k - 1.0) / k)
        best[pos] = np.minimum(best[pos], form2[pos])
    terms = np.exp(np.minimum(best, 0.0) - t * log_d)
    order = np.argsort(terms)       # deterministic ascending accumulation
    total = float(np.sum(terms[order]))
    return total * (1.0 + _SUM_SLACK) + 1e-300


def tail_term(params: BoundParams) -> tuple[float, dict]:
    """C * #S_K * (zeta_K(t/4)^2 / zeta_K(t/2)) * e^{-eps*d*(t-t0)}."""
    fld, t = params.field, params.t
    t0, eps, cc = t0_and_constants(params, "tail")
    if t / 4.0 <= 1.0:
        raise BoundError(f"tail zeta argument t/4 = {t/4} must exceed 1")
    try:
        z4 = dedekind_zeta(fld, t / 4.0, tol=1e-8)
    except ZetaError:
        z4 = dedekind_zeta_loose(fld, t / 4.0)
    z2 = dedekind_zeta(fld, t / 2.0, tol=1e-8)
    zr = z4.upper ** 2 / z2.lower
    value = cc * params.constants.card_s * zr * math.exp(-eps * fld.d * (t - t0))
    value *= 1.0 + _SUM_SLACK
    return value, {"t0": t0, "epsilon": eps, "C": cc, "zeta_ratio": zr}


_enum_cache: dict[tuple[int, float], list[OrbitRecord]] = {}

CACHE_DIR_ENV = "MODLAT_CACHE_DIR"


def cached_enumeration(fld: CyclotomicField, h0: float) -> list[OrbitRecord]:
    """Memoized enumeration; also persisted under $MODLAT_CACHE_DIR if set."""
    import json
    import os
    from .heights import records_as_json, records_from_json

    key = (fld.m, float(h0))
    if key in _enum_cache:
        return _enum_cache[key]
    cache_dir = os.environ.get(CACHE_DIR_ENV)
    path = None
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        path = os.path.join(cache_dir, f"enum_m{fld.m}_X{float(h0):.12g}.json")
        if os.path.exists(path):
            with open(path) as fh:
                records = records_from_json(fld, json.load(fh))
            _enum_cache[key] = records
            return records
    records = enumerate_bounded_height(fld, h0)
    _enum_cache[key] = records
    if path:
        with open(path, "w") as fh:
            json.dump(records_as_json(records), fh)
    return records


def eta_explicit(params: BoundParams,
                 records: list[OrbitRecord] | None = None) -> BoundReport:
    """Explicit-mode eta bound: enumerated low-height sum plus analytic tail."""
    if params.h0 is None:
        raise BoundError("explicit mode requires a height cutoff h0")
    _, _, c_s, _ = params.constants
    if not (c_s <= params.h0 <= 2.0):
        raise BoundError(f"h0 must lie in [c_S, 2], got {params.h0}")
    fld = params.field
    if records is None:
        records = cached_enumeration(fld, params.h0)
    explicit = explicit_orbit_sum(records, params.h0, fld.d, params.t,
                                  params.k_grid)
    tail, tail_info = tail_term(params)
    eta = (explicit + tail) * (1.0 + _SUM_SLACK)
    return BoundReport(
        eta_upper=eta, mode="explicit",
        breakdown={"explicit_sum": explicit, "tail_term": tail,
                   "element_sum": explicit * fld.omega,
                   "h0": params.h0, "n_orbits": len(records),
                   "card_s": params.constants.card_s, **tail_info})


def second_moment_enclosure(params: BoundParams, V: float,
                            report: BoundReport | None = None) -> tuple[float, float]:
    """[V^2 + omega*V, V^2 + omega*V*(1 + omega*eta_upper)]."""
    if V <= 0:
        raise BoundError("ball volume must be positive")
    if report is None:
        report = eta_explicit(params) if params.h0 is not None else eta_asymptotic(params)
    omega = params.field.omega
    lo = V * V + omega * V
    hi = V * V + omega * V * (1.0 + omega * report.eta_upper)
    return lo, hi


# ---------------------------------------------------------------------------
# Figure data grid
# ---------------------------------------------------------------------------

FIGURE_CONDUCTORS = (8, 10, 12, 13, 15, 16)
FIGURE_T_RANGE = tuple(range(15, 33))
FIGURE_HEIGHT_CUTOFF = 100.0  # multiplicative Weil height H_W


def figure_data(conductors=FIGURE_CONDUCTORS, t_values=FIGURE_T_RANGE,
                height_cutoff: float = FIGURE_HEIGHT_CUTOFF) -> list[tuple]:
    """Rows (m, t, ln_eta_upper or None) of explicit-mode bounds.

    The per-field enumeration cutoff is h0 = ln(height_cutoff)/d; cells whose
    bound computation fails carry None instead of aborting the grid.
    """
    from .fieldcore import make_field
    rows = []
    for m in conductors:
        fld = make_field(m)
        h0 = math.log(height_cutoff) / fld.d
        consts = setup_constants(fld, "uniform_cyclotomic")
        try:
            records = cached_enumeration(fld, h0)
        except FieldError:
            records = None
        for t in t_values:
            if records is None:
                rows.append((m, int(t), None))
                continue
            try:
                params = BoundParams(field=fld, t=int(t), constants=consts, h0=h0)
                report = eta_explicit(params, records=records)
                rows.append((m, int(t), math.log(report.eta_upper)))
            except (BoundError, ZetaError):
                rows.append((m, int(t), None))
    return rows


def figure_csv(rows) -> str:
    lines = ["m,t,ln_eta_upper"]
    for m, t, val in rows:
        lines.append(f"{m},{t},{'NA' if val is None else repr(float(val))}")
    return "\n".join(lines) + "\n"
