"""Lattice reduction and enumeration kernels.

LLL runs in float64 with a rational fallback for degenerate inputs.
Ball counting / shortest-vector search use a numba-compiled
Schnorr-Euchner-style depth-first enumeration; small-rank closest-point
sweeps use a pure-Python recursive enumerator.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def gram_schmidt(basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (mu, cnorm): GSO coefficients and squared GS norms."""
    n = basis.shape[0]
    mu = np.zeros((n, n))
    gs = np.zeros_like(basis, dtype=float)
    cnorm = np.zeros(n)
    for i in range(n):
        v = basis[i].astype(float).copy()
        for j in range(i):
            mu[i, j] = np.dot(basis[i], gs[j]) / cnorm[j]
            v -= mu[i, j] * gs[j]
        gs[i] = v
        mu[i, i] = 1.0
        cnorm[i] = np.dot(v, v)
    return mu, cnorm


def lll_reduce(basis: np.ndarray, delta: float = 0.99) -> tuple[np.ndarray, np.ndarray]:
    """LLL-reduce the rows of `basis`; returns (reduced, transform).

    transform is integer with transform @ basis == reduced. Falls back to
    exact rational arithmetic if the float pass hits degenerate GS norms.
    """
    b = np.array(basis, dtype=float)
    n = b.shape[0]
    u = np.eye(n, dtype=object)
    try:
        _lll_float(b, u, delta)
    except FloatingPointError:
        return _lll_fraction(basis, delta)
    if not np.all(np.isfinite(b)):
        return _lll_fraction(basis, delta)
    return b, u


def _lll_float(b: np.ndarray, u: np.ndarray, delta: float) -> None:
    n = b.shape[0]
    with np.errstate(all="raise"):
        mu, c = gram_schmidt(b)
        k = 1
        while k < n:
            # size reduction
            for j in range(k - 1, -1, -1):
                q = round(mu[k, j])
                if q:
                    b[k] -= q * b[j]
                    u[k] -= q * u[j]
                    mu[k, : j + 1] -= q * mu[j, : j + 1]
            if c[k] >= (delta - mu[k, k - 1] ** 2) * c[k - 1]:
                k += 1
            else:
                b[[k - 1, k]] = b[[k, k - 1]]
                u[[k - 1, k]] = u[[k, k - 1]]
                mu, c = gram_schmidt(b)  # simple, fine at n <= 48
                k = max(k - 1, 1)


def _lll_fraction(basis: np.ndarray, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact LLL on the Gram matrix; slow but a safe fallback."""
    rows = [[Fraction(x).limit_denominator(10**15) if not isinstance(x, (int, Fraction)) else Fraction(x)
             for x in row] for row in np.asarray(basis, dtype=object)]
    n = len(rows)
    u = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    deltaf = Fraction(delta).limit_denominator(100)

    def gso(bb):
        mu = [[Fraction(0)] * n for _ in range(n)]
        gs = [row[:] for row in bb]
        cn = [Fraction(0)] * n
        for i in range(n):
            v = bb[i][:]
            for j in range(i):
                mu[i][j] = sum(x * y for x, y in zip(bb[i], gs[j])) / cn[j]
                v = [x - mu[i][j] * y for x, y in zip(v, gs[j])]
            gs[i] = v
            mu[i][i] = Fraction(1)
            cn[i] = sum(x * x for x in v)
            if cn[i] == 0:
                raise ZeroDivisionError("rank-deficient basis")
        return mu, cn

    mu, c = gso(rows)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                rows[k] = [x - q * y for x, y in zip(rows[k], rows[j])]
                u[k] = [x - q * y for x, y in zip(u[k], u[j])]
                mu, c = gso(rows)
        if c[k] >= (deltaf - mu[k][k - 1] ** 2) * c[k - 1]:
            k += 1
        else:
            rows[k - 1], rows[k] = rows[k], rows[k - 1]
            u[k - 1], u[k] = u[k], u[k - 1]
            mu, c = gso(rows)
            k = max(k - 1, 1)
    return (np.array([[float(x) for x in row] for row in rows]),
            np.array([[int(x) for x in row] for row in u], dtype=object))


@njit(cache=True)
def _enum_kernel(mu, cnorm, radius_sq, collect_limit, coords_out):  # pragma: no cover - jit
    """Depth-first enumeration of all nonzero x with ||x B||^2 <= radius_sq.

    Returns (count, min_norm_sq, n_collected); optionally stores coefficient
    vectors in coords_out (when collect_limit > 0). Counts all +-v pairs.
    """
    n = mu.shape[0]
    x = np.zeros(n, dtype=np.int64)
    center = np.zeros(n)
    partial = np.zeros(n + 1)
    lo = np.zeros(n, dtype=np.int64)
    hi = np.zeros(n, dtype=np.int64)
    count = 0
    best = radius_sq * 2.0 + 1.0
    best_idx = -1
    ncol = 0
    level = n - 1
    # initialize top level
    c = 0.0
    center[level] = c
    rem = radius_sq - partial[level + 1]
    halfw = np.sqrt(max(rem, 0.0) / cnorm[level]) if cnorm[level] > 0 else 0.0
    lo[level] = np.int64(np.ceil(c - halfw - 1e-12))
    hi[level] = np.int64(np.floor(c + halfw + 1e-12))
    x[level] = lo[level] - 1
    while level < n:
        x[level] += 1
        if x[level] > hi[level]:
            level += 1
            continue
        diff = x[level] - center[level]
        contrib = diff * diff * cnorm[level]
        newpart = partial[level + 1] + contrib
        if newpart > radius_sq + 1e-9 * (1.0 + radius_sq):
            continue
        if level == 0:
            nonzero = False
            for j in range(n):
                if x[j] != 0:
                    nonzero = True
                    break
            if nonzero:
                count += 1
                if newpart < best:
                    best = newpart
                    best_idx = ncol if collect_limit > 0 else -1
                if collect_limit > 0 and ncol < collect_limit:
                    for j in range(n):
                        coords_out[ncol, j] = x[j]
                    ncol += 1
            continue
        partial[level] = newpart
        level -= 1
        c = 0.0
        for j in range(level + 1, n):
            c -= x[j] * mu[j, level]
        center[level] = c
        rem = radius_sq - partial[level + 1]
        halfw = np.sqrt(max(rem, 0.0) / cnorm[level]) if cnorm[level] > 0 else 0.0
        lo[level] = np.int64(np.ceil(c - halfw - 1e-12))
        hi[level] = np.int64(np.floor(c + halfw + 1e-12))
        x[level] = lo[level] - 1
    return count, best, best_idx


def count_short_vectors(basis: np.ndarray, radius_sq: float) -> tuple[int, float]:
    """(count of nonzero vectors with norm^2 <= radius_sq, minimal norm^2)."""
    mu, cnorm = gram_schmidt(np.asarray(basis, dtype=float))
    dummy = np.zeros((1, basis.shape[0]), dtype=np.int64)
    count, best, _ = _enum_kernel(mu, cnorm, float(radius_sq), 0, dummy)
    return int(count), float(best)


def short_vectors(basis: np.ndarray, radius_sq: float, limit: int = 2_000_000):
    """All nonzero coefficient vectors with ||x B||^2 <= radius_sq."""
    b = np.asarray(basis, dtype=float)
    mu, cnorm = gram_schmidt(b)
    out = np.zeros((limit, b.shape[0]), dtype=np.int64)
    count, best, _ = _enum_kernel(mu, cnorm, float(radius_sq), limit, out)
    if count > limit:
        raise RuntimeError(f"enumeration produced {count} vectors, above limit {limit}")
    return out[: int(count)], float(best)


def shortest_nonzero(basis: np.ndarray) -> tuple[float, np.ndarray]:
    """(lambda_1, integer coefficient witness) by enumeration from the LLL bound."""
    red, transform = lll_reduce(np.asarray(basis, dtype=float))
    start_sq = float(min(np.sum(red * red, axis=1)))
    mu, cnorm = gram_schmidt(red)
    out = np.zeros((2_000_000, red.shape[0]), dtype=np.int64)
    count, best, best_idx = _enum_kernel(mu, cnorm, start_sq * (1 + 1e-9), len(out), out)
    coeffs_red = out[best_idx]
    coeffs = np.array([int(sum(int(c) * int(t) for c, t in zip(coeffs_red, col)))
                       for col in np.array(transform, dtype=object).T], dtype=object)
    return float(np.sqrt(best)), coeffs


def lattice_points_near(basis: np.ndarray, target: np.ndarray, radius_sq: float):
    """Integer coefficient vectors x with ||x B - target||^2 <= radius_sq.

    Pure-Python recursive enumeration; intended for small rank (<= 8).
    Uses the QR decomposition of B^T, so B may have more columns than rows.
    """
    b = np.asarray(basis, dtype=float)
    t = np.asarray(target, dtype=float)
    r = b.shape[0]
    if r == 0:
        return [()] if float(np.dot(t, t)) <= radius_sq + 1e-9 else []
    q, rr = np.linalg.qr(b.T)  # b.T = q @ rr, rr upper-triangular r x r
    tq = q.T @ t
    resid = float(np.dot(t, t) - np.dot(tq, tq))  # component outside the span
    budget = radius_sq - resid
    if budget < -1e-9 * (1 + abs(radius_sq)):
        return []
    budget = max(budget, 0.0)
    results: list[tuple[int, ...]] = []
    x = [0] * r

    def recurse(level: int, remaining: float):
        # solving rr.T-style from the last coordinate down: x satisfies
        # sum over rows: (rr[level,level]*x[level] + known) ~ tq[level]
        known = sum(rr[level, j2] * x[j2] for j2 in range(level + 1, r))
        diag = rr[level, level]
        c = (tq[level] - known) / diag
        halfw = (remaining ** 0.5) / abs(diag)
        for xv in range(int(np.ceil(c - halfw - 1e-12)), int(np.floor(c + halfw + 1e-12)) + 1):
            contrib = (diag * (xv - c)) ** 2
            if contrib > remaining + 1e-9:
                continue
            x[level] = xv
            if level == 0:
                results.append(tuple(x))
            else:
                recurse(level - 1, remaining - contrib)
        x[level] = 0

    recurse(r - 1, budget)
    return results
