"""Certified Dedekind zeta enclosures for cyclotomic fields, real s > 1.

Euler product over rational primes up to a cutoff P0, with two independent
certified tail bounds (the smaller is used):

  1. log zeta_K(s) - partial_K <= d * (log zeta_Q(s) - partial_Q), since each
     local factor satisfies g * -log(1-p^{-fs}) <= d * -log(1-p^{-s});
     zeta_Q(s) itself comes from an Euler-Maclaurin expansion whose remainder
     is bounded by the first omitted term.
  2. A residue-class bound: primes above p depend only on p mod m, and the
     Brun-Titchmarsh inequality pi(x; m, a) <= 2x/(phi(m) log(x/m)) controls
     each class's prime tail sum explicitly.

Partial products are evaluated with mpmath interval arithmetic for small
cutoffs, and with pairwise-summed float64 plus a blanket +-1e-11 inflation of
the log-partials for large cutoffs (pairwise summation error is ~1e-14 here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
import sympy
from mpmath import iv

from .fieldcore import CyclotomicField

_IV_DPS = 40
_FAST_PATH_MIN = 60_000       # cutoffs above this use the vectorized path
_FLOAT_LOG_SLACK = 1e-11      # inflation of float64 log-partials
_MAX_CUTOFF = 200_000_000


class ZetaError(ValueError):
    pass


@dataclass(frozen=True)
class ZetaValue:
    s: float
    lower: float
    upper: float
    prime_cutoff: int

    def __post_init__(self):
        if not (1.0 <= self.lower <= self.upper):
            raise ZetaError(f"invalid enclosure [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


# --------------------------------------------------------------------------
# Riemann zeta via Euler-Maclaurin (interval arithmetic)
# --------------------------------------------------------------------------

def log_zeta_q(s, terms: int = 60, j_max: int = 12):
    """Interval log zeta_Q(s) for real s > 1; width ~ working precision."""
    n = iv.mpf(terms)
    total = iv.mpf(0)
    for kk in range(1, terms):
        total += iv.exp(-s * iv.log(iv.mpf(kk)))
    ns = iv.exp(-s * iv.log(n))
    total += ns / 2 + ns * n / (s - 1)
    poch = s  # rising product s(s+1)...(s+2j-2), starts with one factor
    for j in range(1, j_max + 1):
        b2j = iv.mpf(str(sympy.bernoulli(2 * j)))
        fact = iv.mpf(int(sympy.factorial(2 * j)))
        total += (b2j / fact) * poch * ns * iv.exp((1 - 2 * j) * iv.log(n))
        poch = poch * (s + 2 * j - 1) * (s + 2 * j)
    j = j_max + 1
    b2j = iv.mpf(str(sympy.bernoulli(2 * j)))
    fact = iv.mpf(int(sympy.factorial(2 * j)))
    rem = abs((b2j / fact) * poch * ns * iv.exp((1 - 2 * j) * iv.log(n)))
    total += iv.mpf([-float(rem.b), float(rem.b)])
    return iv.log(total)


# --------------------------------------------------------------------------
# Splitting data and prime tables
# --------------------------------------------------------------------------

def splitting_data(field: CyclotomicField, p: int) -> tuple[int, int, int]:
    """(e, f, g) for the rational prime p in Q(zeta_m); e*f*g = d."""
    m = field.m
    v = 0
    m1 = m
    while m1 % p == 0:
        m1 //= p
        v += 1
    e = int(sympy.totient(m // m1)) if v else 1
    f = int(sympy.n_order(p, m1)) if m1 > 1 else 1
    g = int(sympy.totient(m1)) // f
    return e, f, g


_sieve_cache: dict[str, np.ndarray] = {}


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit (cached numpy sieve, grown on demand)."""
    cached = _sieve_cache.get("primes")
    if cached is not None and _sieve_cache["limit"] >= limit:
        return cached[: int(np.searchsorted(cached, limit, side="right"))]
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if is_p[p]:
            is_p[p * p:: p] = False
    primes = np.flatnonzero(is_p).astype(np.int64)
    _sieve_cache["primes"] = primes
    _sieve_cache["limit"] = limit
    return primes


# --------------------------------------------------------------------------
# Tail bounds
# --------------------------------------------------------------------------

def _bt_tail(field: CyclotomicField, s: float, cutoff: int) -> float:
    """Brun-Titchmarsh upper bound for log zeta_K(s) minus the partial sum."""
    m, d = field.m, field.d
    phi_m = d if m > 2 else 1
    if cutoff <= 2 * max(m, 2):
        return math.inf
    log_ratio = math.log(cutoff / max(m, 1))
    total = 0.0
    for a in field.residues:
        f = int(sympy.n_order(a, m)) if m > 2 else 1
        g = phi_m // f
        sigma = f * s
        cls = (2.0 * sigma / (phi_m * log_ratio)) * cutoff ** (1.0 - sigma) / (sigma - 1.0)
        total += g * cls * (1.0 + 2.0 * cutoff ** (-sigma))
    return total * (1 + 1e-12)


def _integer_majorant_tail(d: int, s: float, cutoff: int) -> float:
    """Crude estimate d * sum_{n > cutoff} n^{-s}, used only to pick cutoffs."""
    return d * (cutoff ** (1.0 - s) / (s - 1.0) + cutoff ** (-s)) * 1.2


# --------------------------------------------------------------------------
# Partial Euler products
# --------------------------------------------------------------------------

def _partials_interval(field: CyclotomicField, siv, cutoff: int):
    log_k = iv.mpf(0)
    log_q = iv.mpf(0)
    d = field.d
    for p in sympy.primerange(2, cutoff + 1):
        piv = iv.mpf(p)
        _, f, g = splitting_data(field, p)
        lp = -iv.log(1 - iv.exp(-siv * iv.log(piv)))
        log_q += lp
        if f == 1 and g == d:
            log_k += d * lp
        else:
            log_k += g * -iv.log(1 - iv.exp(-f * siv * iv.log(piv)))
    return (float(log_k.a), float(log_k.b)), (float(log_q.a), float(log_q.b))


def _partials_fast(field: CyclotomicField, s: float, cutoff: int):
    m, d = field.m, field.d
    primes = primes_up_to(cutoff)
    pf = primes.astype(np.float64)
    xq = np.exp(-s * np.log(pf))
    log_q = float(-np.sum(np.log1p(-xq)))
    unram = primes[np.gcd(primes, m) == 1]
    log_k = 0.0
    if m > 2:
        rcls = (unram % m).astype(np.int64)
        for a in field.residues:
            sel = unram[rcls == a].astype(np.float64)
            if sel.size == 0:
                continue
            f = int(sympy.n_order(a, m))
            g = d // f
            x = np.exp(-f * s * np.log(sel))
            log_k += g * float(-np.sum(np.log1p(-x)))
        for p in primes[np.gcd(primes, m) > 1]:
            _, f, g = splitting_data(field, int(p))
            log_k += g * -math.log1p(-float(p) ** (-f * s))
    else:
        log_k = log_q
    slack = _FLOAT_LOG_SLACK
    return (log_k - slack, log_k + slack), (log_q - slack, log_q + slack)


# --------------------------------------------------------------------------
# Public API
# --------------------------------------------------------------------------

def dedekind_zeta(field: CyclotomicField, s: float, tol: float = 1e-10,
                  max_cutoff: int = _MAX_CUTOFF) -> ZetaValue:
    """Certified enclosure of zeta_K(s) with width <= tol (or ZetaError)."""
    if s <= 1 + 5e-4:
        raise ZetaError(f"s = {s} too close to 1 for a certified tail")
    if tol <= 0:
        raise ZetaError("tolerance must be positive")
    d = field.d
    if field.m <= 2:
        # zeta_Q directly from Euler-Maclaurin: width is working-precision level
        with mpmath.workdps(_IV_DPS):
            val = iv.exp(log_zeta_q(iv.mpf(str(s))))
            return ZetaValue(s=float(s), lower=max(float(val.a) * (1 - 1e-15), 1.0),
                             upper=float(val.b) * (1 + 1e-15), prime_cutoff=0)
    grid = [10_000, 60_000, 300_000, 1_500_000, 8_000_000, 40_000_000, _MAX_CUTOFF]
    grid = [g for g in grid if g <= max_cutoff] or [max_cutoff]
    start = next((g for g in grid
                  if min(_integer_majorant_tail(d, s, g), _bt_tail(field, s, g)) <= 0.4 * tol),
                 grid[-1])
    with mpmath.workdps(_IV_DPS):
        siv = iv.mpf(str(s))
        log_zq = log_zeta_q(siv)
        cutoff = start
        while True:
            if cutoff <= _FAST_PATH_MIN:
                (lk_lo, lk_hi), (lq_lo, lq_hi) = _partials_interval(field, siv, cutoff)
            else:
                (lk_lo, lk_hi), (lq_lo, lq_hi) = _partials_fast(field, s, cutoff)
            tail_em = d * max(float(log_zq.b) - lq_lo, 0.0)
            tail = min(tail_em, _bt_tail(field, s, cutoff))
            lower = float(mpmath.exp(lk_lo)) * (1 - 1e-15)
            upper = float(mpmath.exp(lk_hi + tail)) * (1 + 1e-15)
            lo, hi = max(lower, 1.0), max(upper, 1.0)
            if hi - lo <= tol:
                return ZetaValue(s=float(s), lower=lo, upper=hi, prime_cutoff=cutoff)
            nxt = next((g for g in grid if g > cutoff), None)
            if nxt is None:
                raise ZetaError(
                    f"could not reach tolerance {tol} for zeta_K(s={s}) at prime "
                    f"cutoff {cutoff} (width {hi - lo:.3e})")
            cutoff = nxt


def dedekind_zeta_loose(field: CyclotomicField, s: float) -> ZetaValue:
    """Enclosure at whatever width a moderate cutoff achieves (still certified)."""
    for tol in (1e-10, 1e-8, 1e-6, 1e-3, 1e-1, 1e1, 1e9, 1e30, 1e120, 1e290):
        try:
            return dedekind_zeta(field, s, tol=tol, max_cutoff=2_000_000)
        except ZetaError as exc:
            if "too close to 1" in str(exc):
                raise
    raise ZetaError(f"no usable enclosure for zeta_K({s})")


def zeta_ratio(field: CyclotomicField, t: float, k: float,
               tol: float = 1e-8) -> tuple[float, float]:
    """Certified enclosure of zeta_K(t(1/2-1/k)) * zeta_K(t/k) / zeta_K(t/2)."""
    args = (t * (0.5 - 1.0 / k), t / k, t / 2.0)
    if any(a <= 1 for a in args):
        raise ZetaError(f"zeta-ratio arguments must all exceed 1, got {args}")
    vals = []
    for a in args:
        try:
            vals.append(dedekind_zeta(field, a, tol=tol, max_cutoff=2_000_000))
        except ZetaError:
            vals.append(dedekind_zeta_loose(field, a))
    lo = vals[0].lower * vals[1].lower / vals[2].upper
    hi = vals[0].upper * vals[1].upper / vals[2].lower
    # the ratio is provably >= 1: per prime ideal, (1-y1)(1-y2) <= 1-y1*y2
    return max(lo, 1.0), hi
