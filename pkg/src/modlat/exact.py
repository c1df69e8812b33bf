"""Exact integer / rational linear algebra: HNF, determinants, dual lattices.

Everything here works on small dense matrices (dimension <= ~24), so plain
Python bignums and fractions are fast enough and keep all results exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def det_fraction(rows: list[list[Fraction]]) -> Fraction:
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    n = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                factor = a[r][col] * inv
                for c in range(col, n):
                    a[r][c] -= factor * a[col][c]
    return det


def solve_fraction(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve a nonsingular square rational system exactly."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def invert_fraction(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact inverse of a nonsingular square rational matrix."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def hnf(rows: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice generated by integer rows.

    Returns the nonzero echelon rows: pivots positive, entries above each
    pivot reduced into [0, pivot). Input rows may be linearly dependent.
    """
    a = [list(map(int, row)) for row in rows if any(row)]
    if not a:
        return []
    ncols = len(a[0])
    res: list[list[int]] = []
    col = 0
    while col < ncols and a:
        live = [r for r in a if r[col] != 0]
        rest = [r for r in a if r[col] == 0]
        if not live:
            a = rest
            col += 1
            continue
        # gcd-reduce all rows with a nonzero entry in this column down to one
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            new_live = [piv]
            for r in live[1:]:
                qq = r[col] // piv[col]
                r2 = [x - qq * y for x, y in zip(r, piv)]
                if r2[col] != 0:
                    new_live.append(r2)
                elif any(r2):
                    rest.append(r2)
            live = new_live
        piv = live[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        # reduce earlier pivot rows' entries in this column
        for row in res:
            qq = row[col] // piv[col]
            if qq:
                for c in range(ncols):
                    row[c] -= qq * piv[c]
        res.append(piv)
        a = rest
        col += 1
    return res


def hnf_with_transform(rows: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """HNF plus a transform matrix T with T @ rows == [H; 0-rows].

    T is unimodular over the full input row set. Used when the HNF basis must
    be pulled back to exact combinations of the generators.
    """
    nrows = len(rows)
    ncols = len(rows[0])
    aug = [list(map(int, rows[i])) + [int(i == j) for j in range(nrows)]
           for i in range(nrows)]
    # column-by-column echelon with full transform tracking
    res_rows: list[list[int]] = []
    pending = aug
    col = 0
    while col < ncols and pending:
        live = [r for r in pending if r[col] != 0]
        rest = [r for r in pending if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            new_live = [piv]
            for r in live[1:]:
                qq = r[col] // piv[col]
                r2 = [x - qq * y for x, y in zip(r, piv)]
                if r2[col] != 0:
                    new_live.append(r2)
                else:
                    rest.append(r2)
            live = new_live
        if live:
            piv = live[0]
            if piv[col] < 0:
                piv = [-x for x in piv]
            for row in res_rows:
                qq = row[col] // piv[col]
                if qq:
                    for c in range(ncols + nrows):
                        row[c] -= qq * piv[c]
            res_rows.append(piv)
        pending = rest
        col += 1
    all_rows = res_rows + [r for r in pending if any(r[:ncols])] + \
        [r for r in pending if not any(r[:ncols])]
    h = [r[:ncols] for r in all_rows if any(r[:ncols])]
    t = [r[ncols:] for r in all_rows]
    return h, t


def hnf_fraction(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """HNF basis of the lattice generated by rational rows (common-denominator scaling)."""
    denom = 1
    for row in rows:
        for x in row:
            denom = denom * x.denominator // gcd(denom, x.denominator)
    int_rows = [[int(x * denom) for x in row] for row in rows]
    h = hnf(int_rows)
    return [[Fraction(x, denom) for x in row] for row in h]


def dual_basis(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Dual lattice basis (rows) of a full-rank lattice given by basis rows."""
    inv = invert_fraction(rows)
    # dual rows are the columns of the inverse
    n = len(rows)
    return [[inv[i][j] for i in range(n)] for j in range(n)]


def lattice_intersection(b1: list[list[Fraction]], b2: list[list[Fraction]]) -> list[list[Fraction]]:
    """Basis of the intersection of two full-rank rational lattices (row bases)."""
    d1 = dual_basis(b1)
    d2 = dual_basis(b2)
    dual_sum = hnf_fraction(d1 + d2)
    return dual_basis(dual_sum)
