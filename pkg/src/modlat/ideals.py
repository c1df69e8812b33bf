"""Integral ideals of cyclotomic rings: prime splitting, HNF bases, generators.

All fields handled here have class number 1, so every integral ideal is
principal; generators of primes are found by short-vector enumeration in the
ideal's Minkowski lattice and generators of composites are products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import mpmath
import numpy as np
import sympy

from .exact import hnf
from .fieldcore import CyclotomicField, FieldElement
from .reduction import lll_reduce, short_vectors


def minkowski_rows(fld: CyclotomicField, dps: int = 30) -> np.ndarray:
    """d x d real matrix; row j holds the Minkowski coordinates of zeta^j.

    Convention: ||i_K(x)||^2 = sum over all d embeddings of |sigma(x)|^2, so a
    conjugate pair contributes coordinates (sqrt2*Re sigma, sqrt2*Im sigma).
    """
    d = fld.d
    out = np.zeros((d, d))
    roots = fld.embedding_roots(dps)
    res_index = {a: i for i, a in enumerate(fld.residues)}
    sqrt2 = math.sqrt(2.0)
    for j in range(d):
        col = 0
        for a in fld.residues_half:
            val = roots[res_index[a]][j]
            if fld.m <= 2:
                out[j, col] = float(mpmath.re(val))
                col += 1
            else:
                out[j, col] = sqrt2 * float(mpmath.re(val))
                out[j, col + 1] = sqrt2 * float(mpmath.im(val))
                col += 2
    return out


@dataclass(frozen=True)
class PrimeIdeal:
    p: int
    f: int              # residue degree
    norm: int           # p^f
    poly: tuple[int, ...]   # lifted degree-f factor of Phi_m mod p (monic, asc order)
    hnf_rows: tuple[tuple[int, ...], ...]
    generator: FieldElement

    @property
    def key(self) -> tuple:
        return (self.norm, self.p, self.poly)


@dataclass(frozen=True)
class IntegralIdeal:
    norm: int
    support: tuple[tuple[tuple, int], ...]   # sorted ((prime key, exponent), ...)
    generator: FieldElement

    @property
    def key(self) -> tuple:
        return (self.norm, self.support)

    @property
    def is_unit_ideal(self) -> bool:
        return not self.support

    def coprime_to(self, other: "IntegralIdeal") -> bool:
        mine = {k for k, _ in self.support}
        return all(k not in mine for k, _ in other.support)


def _phi_factors_mod_p(fld: CyclotomicField, p: int) -> list[list[int]]:
    """Distinct monic irreducible factors of Phi_m mod p, ascending coeffs, sorted."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.cyclotomic_poly(fld.m, x), x, modulus=p)
    _, factors = poly.factor_list()
    lifted = []
    for fac, _mult in factors:
        coeffs = [int(c) % p for c in fac.all_coeffs()[::-1]]  # ascending
        lifted.append(coeffs)
    lifted.sort()
    return lifted


def _generator_search(fld: CyclotomicField, rows: list[list[int]], target_norm: int,
                      mink: np.ndarray) -> FieldElement:
    """Element of the ideal with |norm| == target_norm, by growing-radius enumeration."""
    basis = np.array(rows, dtype=float) @ mink
    red, transform = lll_reduce(basis)
    tmat = np.array(transform, dtype=object)
    radius_sq = float(min(np.sum(red * red, axis=1))) * 1.001
    seen: set[tuple] = set()
    for _ in range(60):
        vecs, _best = short_vectors(red, radius_sq, limit=300_000)
        order = np.argsort(np.sum((vecs @ red) ** 2, axis=1))
        for idx in order:
            x = tuple(int(v) for v in vecs[idx])
            if x in seen or tuple(-v for v in x) in seen:
                continue
            seen.add(x)
            coeffs_red = [sum(int(xi) * int(tmat[i][jj]) for i, xi in enumerate(x))
                          for jj in range(len(rows))]
            coeffs = [sum(coeffs_red[i] * rows[i][jc] for i in range(len(rows)))
                      for jc in range(len(rows[0]))]
            elem = fld.element(coeffs)
            if elem.norm() == target_norm:
                return elem
        radius_sq *= 1.6
    raise RuntimeError(f"no generator of norm {target_norm} found (conductor {fld.m})")


def prime_ideals_up_to(fld: CyclotomicField, cap: int) -> list[PrimeIdeal]:
    """All prime ideals of O_K with norm <= cap, with generators."""
    mink = minkowski_rows(fld)
    d = fld.d
    out = []
    for p in sympy.primerange(2, cap + 1):
        for coeffs in _phi_factors_mod_p(fld, int(p)):
            f = len(coeffs) - 1
            norm = int(p) ** f
            if norm > cap:
                continue
            gens = [[p if i == j else 0 for j in range(d)] for i in range(d)]
            poly_elem = fld.element([Fraction(c) for c in coeffs])
            zeta = fld.zeta()
            cur = poly_elem
            for _ in range(d):
                gens.append([int(c) for c in cur.coeffs])
                cur = cur * zeta
            rows = hnf(gens)
            gen = _generator_search(fld, rows, norm, mink)
            out.append(PrimeIdeal(p=int(p), f=f, norm=norm, poly=tuple(coeffs),
                                  hnf_rows=tuple(tuple(r) for r in rows), generator=gen))
    out.sort(key=lambda pr: pr.key)
    return out


def integral_ideals_up_to(fld: CyclotomicField, cap: int) -> list[IntegralIdeal]:
    """All integral ideals of norm <= cap (as prime products with generators)."""
    primes = prime_ideals_up_to(fld, cap)
    results: list[IntegralIdeal] = []

    def extend(idx: int, norm: int, support: list, gen: FieldElement):
        results.append(IntegralIdeal(norm=norm, support=tuple(support), generator=gen))
        for i in range(idx, len(primes)):
            pr = primes[i]
            if norm * pr.norm > cap:
                continue
            e = 1
            cur_norm = norm * pr.norm
            cur_gen = gen * pr.generator
            while cur_norm <= cap:
                extend(i + 1, cur_norm, support + [(pr.key, e)], cur_gen)
                e += 1
                cur_norm *= pr.norm
                if cur_norm <= cap:
                    cur_gen = cur_gen * pr.generator

    extend(0, 1, [], fld.one())
    results.sort(key=lambda ideal: ideal.key)
    return results
