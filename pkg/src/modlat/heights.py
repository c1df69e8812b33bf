"""Weil heights, unit groups, bounded-height enumeration, exceptional units.

Heights are logarithmic and normalized by the field degree d:
    h_inf(a) = (1/d) * sum over all embeddings of max(0, ln|sigma(a)|)
    h(a)     = h_inf(a) + ln(D(a)) / d
with D(a) the denominator index [O_K : a^{-1} O_K cap O_K].

Enumeration of {a in K^x : h(a) <= X} works in fields of class number one
(and real-subfield class number one), where units are generated by cyclotomic
units: all fractional ideals are quotients of coprime integral ideals of norm
<= e^{dX}, each principal with a short generator, and unit multiples are swept
through a box in the unit-log lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
import sympy

from .exact import hnf_with_transform
from .fieldcore import CyclotomicField, FieldElement, FieldError
from .ideals import integral_ideals_up_to
from .reduction import lattice_points_near, lll_reduce

# Conductors of all cyclotomic fields with class number one (and real-subfield
# class number one). Outside this list enumeration refuses to run.
CLASS_NUMBER_ONE_CONDUCTORS = frozenset({
    1, 3, 4, 5, 7, 8, 9, 11, 12, 13, 15, 16, 17, 19, 20, 21, 24, 25, 27, 28,
    32, 33, 35, 36, 40, 44, 45, 48, 60, 84,
})

_ROUND_UP = 1.0 + 2.0 ** -48


class EnumerationUnavailable(FieldError):
    """Raised when completeness of bounded-height enumeration cannot be assured."""


def conductor(m: int) -> int:
    """Conductor of Q(zeta_m): m unless m = 2 mod 4, where it is m/2."""
    return m // 2 if m % 4 == 2 else m


def enumeration_supported(field: CyclotomicField) -> bool:
    return conductor(field.m) in CLASS_NUMBER_ONE_CONDUCTORS


def galois_apply(alpha: FieldElement, a: int) -> FieldElement:
    """The automorphism zeta -> zeta^a applied to alpha (a coprime to m)."""
    fld = alpha.field
    out = fld.zero()
    for j, c in enumerate(alpha.coeffs):
        if c:
            out = out + c * fld.zeta(a * j)
    return out


# ---------------------------------------------------------------------------
# Log embeddings and heights
# ---------------------------------------------------------------------------

def log_embedding(alpha: FieldElement, dps: int | None = None) -> np.ndarray:
    """Log vector over one embedding per conjugate pair.

    Coordinate j is ln|sigma(alpha)| for the real embedding (m <= 2) and
    2*ln|sigma(alpha)| for a complex pair, so the coordinates sum to
    ln|N(alpha)| and (1/d)*sum(max(0, .)) equals h_inf.
    """
    fld = alpha.field
    embs = alpha.embeddings(dps)
    idx = {a: i for i, a in enumerate(fld.residues)}
    out = np.empty(len(fld.residues_half))
    for j, a in enumerate(fld.residues_half):
        val = embs[idx[a]]
        mag2 = mpmath.re(val) ** 2 + mpmath.im(val) ** 2
        if mag2 == 0:
            raise ZeroDivisionError("log embedding of zero")
        half_log = float(mpmath.log(mag2)) / 2.0
        out[j] = half_log if fld.m <= 2 else 2.0 * half_log
    return out


def h_inf_of_logvec(logvec: np.ndarray, d: int) -> float:
    return float(np.sum(np.clip(logvec, 0.0, None))) / d


@dataclass(frozen=True)
class HeightProfile:
    h_inf: float       # archimedean height, rounded upward
    h_weil: float      # h_inf + log_D / d, rounded upward
    log_D: float       # ln of the denominator index
    norm_abs: Fraction
    D: int

    def as_json(self) -> dict:
        return {"h_inf": self.h_inf, "h_weil": self.h_weil,
                "D": self.D, "norm": str(self.norm_abs)}


def height_profile(alpha: FieldElement) -> HeightProfile:
    """Certified height data of a nonzero element; magnitudes rounded upward."""
    if alpha.is_zero():
        raise ZeroDivisionError("height of zero")
    d = alpha.field.d
    hi = h_inf_of_logvec(log_embedding(alpha), d)
    hi = hi * _ROUND_UP + 1e-40 if hi > 0 else 0.0
    dd = alpha.denominator_index()
    log_d = math.log(dd) * _ROUND_UP if dd > 1 else 0.0
    return HeightProfile(h_inf=hi, h_weil=hi + log_d / d, log_D=log_d,
                         norm_abs=alpha.norm(), D=dd)


# ---------------------------------------------------------------------------
# Unit group from cyclotomic units
# ---------------------------------------------------------------------------

class UnitGroup:
    """Free part of O_K^x: generators mod torsion plus their log vectors."""

    def __init__(self, field: CyclotomicField, generators: list[FieldElement]):
        self.field = field
        self.generators = list(generators)
        self.rank = len(generators)
        ncoords = len(field.residues_half)
        self.log_basis = np.array([log_embedding(g) for g in generators],
                                  dtype=float).reshape(self.rank, ncoords)

    def element(self, exponents) -> FieldElement:
        out = self.field.one()
        for g, e in zip(self.generators, exponents):
            if e:
                out = out * g ** int(e)
        return out


def _torsion_generator(fld: CyclotomicField) -> FieldElement:
    """A generator of mu(K), of order omega."""
    return fld.zeta() if fld.m % 2 == 0 else -fld.zeta()


def _cyclotomic_unit_pool(fld: CyclotomicField) -> list[FieldElement]:
    """Standard cyclotomic-unit generators over all levels n | omega, n > 2.

    At prime-power level n the ratios (1-zeta_n^a)/(1-zeta_n) are units; at
    composite level the elements 1-zeta_n^a themselves are. For the class
    number one conductors handled here these generate the full unit group
    modulo torsion.
    """
    big = fld.omega
    g0 = _torsion_generator(fld)
    pool: list[FieldElement] = []
    seen: set[tuple] = set()
    for n in sympy.divisors(big):
        if n <= 2:
            continue
        zn = g0 ** (big // n)
        prime_power = len(sympy.primefactors(n)) == 1
        base_inv = (1 - zn).inverse() if prime_power else None
        for a in range(2 if prime_power else 1, n):
            if math.gcd(a, n) != 1:
                continue
            u = (1 - zn ** a) * base_inv if prime_power else 1 - zn ** a
            if u.norm() != 1:
                raise RuntimeError("cyclotomic unit candidate is not a unit")
            if u.is_root_of_unity():
                continue
            if u.coeffs not in seen:
                seen.add(u.coeffs)
                pool.append(u)
    return pool


def _pool_items(fld, pool):
    d = fld.d
    items = []
    for u in pool:
        lv = log_embedding(u)
        items.append((h_inf_of_logvec(lv, d), tuple(str(c) for c in u.coeffs), u, lv))
    items.sort(key=lambda t: (t[0], t[1]))
    return [(u, lv) for _h, _key, u, lv in items]


def _saturate(fld, gens, logs, items):
    """Refine a finite-index subgroup until every pool unit lies in it."""
    r = len(gens)
    for _guard in range(64):
        basis = np.array(logs)
        gram = basis @ basis.T
        offender = None
        for u, lv in items:
            coords = np.linalg.solve(gram, basis @ lv)
            if np.max(np.abs(coords - np.round(coords))) > 1e-7:
                offender = (u, coords)
                break
        if offender is None:
            return gens, logs
        u, coords = offender
        fracs = [Fraction(x).limit_denominator(256) for x in coords]
        q = math.lcm(*[f.denominator for f in fracs])
        p = [int(f * q) for f in fracs]
        rhs = fld.one()
        for g, e in zip(gens, p):
            rhs = rhs * g ** e
        if not ((u ** q) / rhs).is_root_of_unity():
            raise RuntimeError("unit-group saturation failed its exactness check")
        rows = [[q * int(i == j) for j in range(r)] for i in range(r)] + [p]
        hmat, tmat = hnf_with_transform(rows)
        if len(hmat) != r:
            raise RuntimeError("saturation produced a rank-deficient lattice")
        new_gens = []
        for j in range(r):
            g = fld.one()
            for i in range(r):
                if tmat[j][i]:
                    g = g * gens[i] ** tmat[j][i]
            if tmat[j][r]:
                g = g * u ** tmat[j][r]
            new_gens.append(g)
        gens = new_gens
        logs = [log_embedding(g) for g in gens]
    raise RuntimeError("unit-group saturation did not converge")


_unit_group_cache: dict[int, UnitGroup] = {}


def unit_group(fld: CyclotomicField) -> UnitGroup:
    """Full unit group mod torsion (valid on class number one conductors)."""
    if fld.m in _unit_group_cache:
        return _unit_group_cache[fld.m]
    if not enumeration_supported(fld):
        raise EnumerationUnavailable(
            f"unit generation is only certified for class number one "
            f"conductors, not m={fld.m}")
    r = fld.unit_rank
    if r == 0:
        ug = UnitGroup(fld, [])
        _unit_group_cache[fld.m] = ug
        return ug
    items = _pool_items(fld, _cyclotomic_unit_pool(fld))
    gens: list[FieldElement] = []
    logs: list[np.ndarray] = []
    for u, lv in items:
        if len(gens) == r:
            break
        if not gens:
            if np.linalg.norm(lv) > 1e-8:
                gens.append(u)
                logs.append(lv)
            continue
        basis = np.array(logs)
        coords, *_ = np.linalg.lstsq(basis.T, lv, rcond=None)
        if np.linalg.norm(basis.T @ coords - lv) > 1e-7:
            gens.append(u)
            logs.append(lv)
    if len(gens) < r:
        raise RuntimeError(
            f"cyclotomic unit pool spans rank {len(gens)} < {r} for m={fld.m}")
    gens, logs = _saturate(fld, gens, logs, items)
    red, transform = lll_reduce(np.array(logs))
    new_gens = []
    for j in range(r):
        g = fld.one()
        for i in range(r):
            if transform[j][i]:
                g = g * gens[i] ** int(transform[j][i])
        new_gens.append(g)
    # deterministic orientation: largest-magnitude log coordinate positive
    final = []
    for g in new_gens:
        lv = log_embedding(g)
        if lv[int(np.argmax(np.abs(lv)))] < 0:
            g = g.inverse()
        final.append(g)
    ug = UnitGroup(fld, final)
    _unit_group_cache[fld.m] = ug
    return ug


# ---------------------------------------------------------------------------
# Unit sweeps in the log lattice
# ---------------------------------------------------------------------------

def units_in_region(ug: UnitGroup, shift: np.ndarray, X: float,
                    tol: float = 1e-9) -> list[tuple[int, ...]]:
    """Exponent vectors e with h_inf-style value of (shift + e @ log_basis) <= X.

    The constraint (1/d) * sum max(0, y_j) <= X with sum(y) fixed confines y to
    a box, whose circumscribed ball drives a closest-point enumeration.
    """
    fld = ug.field
    d = fld.d
    nc = len(fld.residues_half)
    shift = np.asarray(shift, dtype=float)
    if ug.rank == 0:
        ok = h_inf_of_logvec(shift, d) <= X + tol
        return [()] if ok else []
    total = float(np.sum(shift))  # = sum(y): unit log vectors sum to zero
    if total > d * X + d * tol:
        return []
    # box: y_j <= dX and y_j >= total - (nc-1) dX; ball around its center
    center = (total - (nc - 2) * d * X) / 2.0
    radius = math.sqrt(nc) * (nc * d * X - total) / 2.0 + 1e-6
    target = np.full(nc, center) - shift
    cands = lattice_points_near(ug.log_basis, target, radius * radius)
    out = []
    for e in cands:
        y = shift + np.asarray(e, dtype=float) @ ug.log_basis
        if float(np.sum(np.clip(y, 0.0, None))) / d <= X + tol:
            out.append(tuple(int(v) for v in e))
    out.sort()
    return out


def shifted_unit_count(fld: CyclotomicField, shift: np.ndarray, X: float) -> int:
    """Number of units u (torsion included) with the height of the shifted
    log vector shift + log(u) at most X."""
    ug = unit_group(fld)
    return fld.omega * len(units_in_region(ug, shift, X, tol=0.0))


# ---------------------------------------------------------------------------
# Bounded-height enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitRecord:
    """One mu(K)-orbit of elements of bounded height."""
    element: FieldElement
    profile: HeightProfile
    self_inverse: bool   # True when the inverse orbit coincides with this one

    def as_json(self) -> dict:
        rec = {"coeffs": [str(c) for c in self.element.coeffs]}
        rec.update(self.profile.as_json())
        return rec

    def sort_key(self):
        return (self.profile.h_weil, self.profile.D,
                self.profile.norm_abs, tuple(str(c) for c in self.element.coeffs))


def _is_self_inverse(alpha: FieldElement) -> bool:
    sq = alpha * alpha
    return sq.is_integral() and sq.is_root_of_unity()


def enumerate_bounded_height(fld: CyclotomicField, X: float) -> list[OrbitRecord]:
    """All mu(K)-orbits of {a in K^x minus mu(K) : h(a) <= X}.

    Complete: every such a is zeta * r for a listed representative r. Inverse
    orbits are listed explicitly (self-inverse orbits once, flagged).
    """
    if not X > 0:
        raise ValueError("height bound must be positive")
    if X > 2:
        raise ValueError("height bound above the practical cap 2")
    if not enumeration_supported(fld):
        raise EnumerationUnavailable(
            f"bounded-height enumeration requires class number one, "
            f"unavailable for m={fld.m}")
    d = fld.d
    ug = unit_group(fld)
    cap = int(math.floor(math.exp(d * X) * (1 + 1e-12)))
    ideals = integral_ideals_up_to(fld, cap)
    records: list[OrbitRecord] = []
    for ia, num in enumerate(ideals):
        for jb in range(ia + 1):
            den = ideals[jb]
            if ia == jb:
                if not num.is_unit_ideal:
                    continue
                gen = fld.one()
            else:
                if not num.coprime_to(den):
                    continue
                gen = num.generator / den.generator
            x_eff = X - math.log(den.norm) / d
            if x_eff < -1e-12:
                continue
            shift = log_embedding(gen)
            for e in units_in_region(ug, shift, x_eff):
                if ia == jb and not any(e):
                    continue  # the torsion orbit itself is excluded
                alpha = gen * ug.element(e) if any(e) else gen
                prof = height_profile(alpha)
                if prof.D != den.norm or prof.norm_abs != Fraction(num.norm, den.norm):
                    raise RuntimeError("ideal decomposition mismatch in enumeration")
                if prof.h_weil > X + 1e-10:
                    continue
                self_inv = _is_self_inverse(alpha)
                records.append(OrbitRecord(alpha, prof, self_inv))
                if not self_inv:
                    inv = alpha.inverse()
                    records.append(OrbitRecord(inv, height_profile(inv), False))
    records.sort(key=OrbitRecord.sort_key)
    return records


def records_as_json(records: list[OrbitRecord]) -> list[dict]:
    return [r.as_json() for r in records]


def records_from_json(fld: CyclotomicField, data: list[dict]) -> list[OrbitRecord]:
    out = []
    for rec in data:
        alpha = fld.element([Fraction(c) for c in rec["coeffs"]])
        prof = height_profile(alpha)
        out.append(OrbitRecord(alpha, prof, _is_self_inverse(alpha)))
    return out


# ---------------------------------------------------------------------------
# Exceptional unit set S_K
# ---------------------------------------------------------------------------

def exceptional_values(fld: CyclotomicField) -> list[FieldElement]:
    """Low-height totally positive integer units of the exception list that
    lie in K, closed under Galois conjugation and inversion.

    The three exceptional values are squares of 2cos(pi/5), 2cos(pi/7) and
    2cos(pi/30); each lies in K exactly when the conductor of its field
    (5, 7 and 15 respectively) divides the conductor of K.
    """
    m = fld.m
    f = conductor(m)
    base: list[FieldElement] = []
    if f % 5 == 0:
        base.append(2 + fld.zeta(2 * m // 5) + fld.zeta(-2 * m // 5))
    if f % 7 == 0:
        base.append(2 + fld.zeta(2 * m // 7) + fld.zeta(-2 * m // 7))
    if f % 15 == 0:
        base.append(2 - fld.zeta(8 * m // 15) - fld.zeta(-8 * m // 15))
    values: dict[tuple, FieldElement] = {}
    for v in base:
        for w in (v, v.inverse()):
            for a in fld.residues:
                conj = galois_apply(w, a)
                values[conj.coeffs] = conj
    ordered = sorted(values.values(), key=lambda v: tuple(str(c) for c in v.coeffs))
    return ordered


@dataclass(frozen=True)
class ExceptionSet:
    field: CyclotomicField
    members: tuple[FieldElement, ...]   # unit orbit representatives mod mu(K)
    cardinality: int                    # number of units, = omega * len(members)
    values: tuple[FieldElement, ...]


def exception_set(fld: CyclotomicField) -> ExceptionSet:
    """S_K: units u whose totally positive norm form u * conj(u) is 1 or one of
    the exceptional values present in K. Always contains mu(K)."""
    values = exceptional_values(fld)
    members: list[FieldElement] = [fld.one()]
    if values:
        ug = unit_group(fld)
        basis = ug.log_basis
        for v in values:
            # u * conj(u) = v forces log(u) = log-vector(v)/2 exactly,
            # so solve for the exponents and verify exactly.
            target = log_embedding(v) / 2.0
            coords, *_ = np.linalg.lstsq(basis.T, target, rcond=None)
            if np.linalg.norm(basis.T @ coords - target) > 1e-8:
                continue
            rounded = np.round(coords)
            if np.max(np.abs(coords - rounded)) > 1e-7:
                continue
            u = ug.element([int(x) for x in rounded])
            if u * u.conjugate() == v:
                members.append(u)
    card = fld.omega * len(members)
    if card > 17 * fld.omega:
        raise RuntimeError("exception set exceeds its cardinality bound")
    return ExceptionSet(field=fld, members=tuple(members),
                        cardinality=card, values=tuple(values))


# ---------------------------------------------------------------------------
# Setup constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SetupConstants:
    c: float
    c_o: float
    c_s: float
    card_s: int

    def __iter__(self):
        return iter((self.c, self.c_o, self.c_s, self.card_s))


def setup_constants(fld: CyclotomicField, mode: str = "uniform_cyclotomic",
                    c: float | None = None, c_o: float | None = None,
                    c_s: float | None = None,
                    card_s: int | None = None) -> SetupConstants:
    """Height-gap constants (c, c_o, c_S, #S_K) for the bound engine."""
    if mode == "uniform_cyclotomic":
        card = card_s if card_s is not None else exception_set(fld).cardinality
        return SetupConstants(0.155, 0.2406, 0.271763, card)
    if mode == "voutier_generic":
        d = fld.d
        if d < 3:
            raise FieldError("voutier_generic needs degree >= 3; use user mode")
        val = (1.0 / (4 * d)) * (math.log(math.log(d)) / math.log(d)) ** 3
        if val <= 0:
            raise FieldError("voutier_generic constant is nonpositive here")
        return SetupConstants(val, val, val, fld.omega)
    if mode == "user":
        if c is None or c_o is None or c_s is None:
            raise FieldError("user mode requires c, c_o and c_s")
        if not (0 < c <= c_o <= c_s):
            raise FieldError(f"need 0 < c <= c_o <= c_S, got ({c}, {c_o}, {c_s})")
        card = card_s if card_s is not None else exception_set(fld).cardinality
        return SetupConstants(c, c_o, c_s, card)
    raise FieldError(f"unknown setup-constants mode {mode!r}")
