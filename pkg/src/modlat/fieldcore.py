"""Exact arithmetic in cyclotomic fields Q(zeta_m), with Q as the m in {1,2} case.

Elements are exact rational coefficient vectors in the power basis
1, zeta, ..., zeta^{d-1}; embeddings are evaluated with mpmath at an
adaptive precision chosen from the coefficient sizes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import sympy

from .exact import det_fraction, hnf, solve_fraction

DEFAULT_DPS = 50


class FieldError(ValueError):
    pass


@lru_cache(maxsize=None)
def make_field(m: int) -> "CyclotomicField":
    """Construct (and cache) the cyclotomic field of conductor m."""
    return CyclotomicField(m)


class CyclotomicField:
    """Q(zeta_m): conductor, degree, signature, embedding data, Phi_m."""

    def __init__(self, m: int):
        if not isinstance(m, int) or m < 1:
            raise FieldError(f"conductor must be a positive integer, got {m!r}")
        self.m = m
        self.d = int(sympy.totient(m))
        if m <= 2:
            self.r1, self.r2 = 1, 0
            self.omega = 2
        else:
            self.r1, self.r2 = 0, self.d // 2
            self.omega = m if m % 2 == 0 else 2 * m
        self.unit_rank = self.r1 + self.r2 - 1
        self.signature = (self.r1, self.r2)
        x = sympy.Symbol("x")
        poly = sympy.Poly(sympy.cyclotomic_poly(m, x), x)
        coeffs = [int(c) for c in poly.all_coeffs()]  # degree-descending, monic
        self.min_poly = coeffs
        # zeta^d = -(c_1 zeta^{d-1} + ... + c_d); store the reduction row
        self._reduction = [Fraction(-c) for c in coeffs[1:][::-1]]  # index j -> coeff of zeta^j
        # embedding residues: a coprime to m, paired so conjugates are adjacent-free
        self.residues = [a for a in range(1, m + 1) if math.gcd(a, m) == 1]
        # representatives of embeddings up to conjugation (one per pair for m>2)
        if m <= 2:
            self.residues_half = [self.residues[0]]
        else:
            seen = set()
            half = []
            for a in self.residues:
                if a not in seen:
                    half.append(a)
                    seen.add(a)
                    seen.add((m - a) % m)
            self.residues_half = half
        self._root_cache: dict[int, list[list[mpmath.mpc]]] = {}

    def __repr__(self):
        return f"CyclotomicField(m={self.m})"

    def __hash__(self):
        return hash(("CyclotomicField", self.m))

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and other.m == self.m

    # -- element constructors ------------------------------------------------
    def element(self, coeffs) -> "FieldElement":
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > self.d:
            coeffs = self._reduce(coeffs)
        coeffs = coeffs + [Fraction(0)] * (self.d - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    def zero(self) -> "FieldElement":
        return self.element([0])

    def one(self) -> "FieldElement":
        return self.element([1])

    def zeta(self, power: int = 1) -> "FieldElement":
        """zeta_m^power as an element (power may be any integer)."""
        power %= self.m
        if self.m <= 2:
            return self.element([(-1) ** power if self.m == 2 else 1])
        coeffs = [Fraction(0)] * (power + 1)
        coeffs[power] = Fraction(1)
        return self.element(coeffs)

    def _reduce(self, coeffs: list[Fraction]) -> list[Fraction]:
        """Reduce a coefficient list mod Phi_m to length <= d."""
        d = self.d
        coeffs = list(coeffs)
        for k in range(len(coeffs) - 1, d - 1, -1):
            top = coeffs[k]
            if top:
                coeffs[k] = Fraction(0)
                for j, rc in enumerate(self._reduction):
                    if rc:
                        coeffs[k - d + j] += top * rc
        while len(coeffs) > d:
            coeffs.pop()
        return coeffs

    # -- embeddings ----------------------------------------------------------
    def embedding_roots(self, dps: int) -> list[list[mpmath.mpc]]:
        """Powers zeta_m^{a*j} for each embedding residue a, at dps digits."""
        if dps not in self._root_cache:
            with mpmath.workdps(dps):
                rows = []
                for a in self.residues:
                    row = [mpmath.e ** (2j * mpmath.pi * ((a * j) % self.m) / self.m)
                           for j in range(self.d)]
                    rows.append(row)
            self._root_cache[dps] = rows
        return self._root_cache[dps]


class FieldElement:
    """Immutable element of a cyclotomic field with exact rational coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: CyclotomicField, coeffs: tuple[Fraction, ...]):
        self.field = field
        self.coeffs = coeffs

    def __repr__(self):
        return f"FieldElement(m={self.field.m}, {[str(c) for c in self.coeffs]})"

    def __hash__(self):
        return hash((self.field.m, self.coeffs))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.element([other])
        return (isinstance(other, FieldElement) and other.field == self.field
                and other.coeffs == self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        d = self.field.d
        prod = [Fraction(0)] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        return self.field.element(prod)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements from different fields")
            return other
        return self.field.element([other])

    # -- structural operations -----------------------------------------------
    def multiplication_matrix(self) -> list[list[Fraction]]:
        """Matrix M with column j = coefficients of alpha * zeta^j."""
        d = self.field.d
        cols = []
        cur = self
        zeta = self.field.zeta()
        for _ in range(d):
            cols.append(cur.coeffs)
            cur = cur * zeta
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        d = self.field.d
        rhs = [Fraction(1)] + [Fraction(0)] * (d - 1)
        sol = solve_fraction(self.multiplication_matrix(), rhs)
        return FieldElement(self.field, tuple(sol))

    def conjugate(self) -> "FieldElement":
        """Complex conjugation zeta -> zeta^{-1} (identity on Q)."""
        field = self.field
        out = field.zero()
        for j, c in enumerate(self.coeffs):
            if c:
                out = out + c * field.zeta(-j)
        return out

    def embeddings(self, dps: int | None = None) -> list[mpmath.mpc]:
        """All d complex embedding values, at >= 10^{-30} absolute accuracy."""
        field = self.field
        if dps is None:
            size = max((abs(c.numerator) + c.denominator for c in self.coeffs), default=1)
            dps = DEFAULT_DPS + len(str(size))
        roots = field.embedding_roots(dps)
        with mpmath.workdps(dps):
            vals = []
            for row in roots:
                acc = mpmath.mpc(0)
                for c, w in zip(self.coeffs, row):
                    if c:
                        acc += mpmath.mpf(c.numerator) / c.denominator * w
                vals.append(acc)
        return vals

    def signed_norm(self) -> Fraction:
        """Product of all embeddings, as an exact rational (with sign)."""
        if self.is_zero():
            raise ZeroDivisionError("norm of zero")
        return det_fraction(self.multiplication_matrix())

    def norm(self) -> Fraction:
        """|N(alpha)| exactly."""
        return abs(self.signed_norm())

    def denominator_kernel(self) -> tuple[int, list[list[Fraction]]]:
        """(D(alpha), basis of {x in O_K : alpha*x in O_K}) via HNF.

        D(alpha) = [O_K : alpha^{-1} O_K  cap  O_K] = q^d / det(HNF([qI; A^T]))
        where A = q * M_alpha with q the common denominator of M_alpha.
        """
        if self.is_zero():
            raise ZeroDivisionError("denominator index of zero")
        d = self.field.d
        mat = self.multiplication_matrix()
        q = 1
        for row in mat:
            for x in row:
                q = q * x.denominator // math.gcd(q, x.denominator)
        a = [[int(x * q) for x in row] for row in mat]
        gens = [[q if i == j else 0 for j in range(d)] for i in range(d)]
        gens += [[a[i][j] for i in range(d)] for j in range(d)]  # rows of A^T
        h = hnf(gens)
        det_h = 1
        for i, row in enumerate(h):
            det_h *= row[i]
        index = q ** d // abs(det_h)
        # kernel lattice = dual of (1/q) * H (rows), i.e. inverse-transpose of H/q
        from .exact import dual_basis
        hq = [[Fraction(x, q) for x in row] for row in h]
        kern = dual_basis(hq)
        return index, kern

    def denominator_index(self) -> int:
        """D(alpha): index of {x in O_K : alpha*x in O_K} inside O_K."""
        return self.denominator_kernel()[0]

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def is_root_of_unity(self) -> bool:
        if self.is_zero():
            return False
        if not self.is_integral():
            return False
        # cheap screen: every coefficient of a root of unity is in {-1,0,1}
        # only after reduction of +-zeta^j; but sums of Phi-reduction can give
        # other small values, so screen by norm instead.
        if self.norm() != 1:
            return False
        return (self ** self.field.omega) == self.field.one()
