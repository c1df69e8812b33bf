"""Lattice reduction and enumeration, checked against brute-force searches."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modlat.reduction import (count_short_vectors, gram_schmidt,
                              lattice_points_near, lll_reduce, short_vectors,
                              shortest_nonzero)


def random_basis(rng, n, scale=5):
    while True:
        b = rng.integers(-scale, scale + 1, size=(n, n)).astype(float)
        if abs(np.linalg.det(b)) > 0.5:
            return b


def brute_shortest(basis, box=6):
    n = basis.shape[0]
    best = None
    for coeffs in itertools.product(range(-box, box + 1), repeat=n):
        if not any(coeffs):
            continue
        v = np.asarray(coeffs, float) @ basis
        norm = float(v @ v)
        if best is None or norm < best:
            best = norm
    return best


@pytest.mark.parametrize("n", [2, 3, 4])
def test_shortest_vector_matches_brute_force(n):
    rng = np.random.default_rng(12345 + n)
    for _ in range(5):
        basis = random_basis(rng, n, scale=4)
        lam, coeffs = shortest_nonzero(basis)
        assert abs(lam * lam - brute_shortest(basis)) < 1e-7
        # returned witness really achieves that length
        vec = np.asarray([float(c) for c in coeffs]) @ basis
        assert abs(float(vec @ vec) - lam * lam) < 1e-7


def test_count_short_vectors_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(5):
        basis = random_basis(rng, 3, scale=3)
        radius_sq = 4.0 * float(np.min(np.sum(basis * basis, axis=1)))
        count, min_norm = count_short_vectors(basis, radius_sq)
        brute = 0
        for coeffs in itertools.product(range(-14, 15), repeat=3):
            if not any(coeffs):
                continue
            v = np.asarray(coeffs, float) @ basis
            if float(v @ v) <= radius_sq + 1e-9:
                brute += 1
        assert count == brute
        assert count % 2 == 0  # +/- pairing


def test_short_vectors_listing_is_complete():
    basis = np.array([[2.0, 0.0], [1.0, 2.0]])
    vecs, _best = short_vectors(basis, 9.0)
    got = {tuple(int(x) for x in c) for c in vecs}
    brute = set()
    for a in range(-6, 7):
        for b in range(-6, 7):
            if (a, b) == (0, 0):
                continue
            v = np.array([a, b], float) @ basis
            if float(v @ v) <= 9.0 + 1e-9:
                brute.add((a, b))
    assert got == brute


@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
@settings(max_examples=15, deadline=None)
def test_lll_preserves_lattice_and_reduces(seed):
    rng = np.random.default_rng(seed)
    basis = random_basis(rng, 4, scale=8)
    reduced, transform = lll_reduce(basis)
    assert np.allclose(np.asarray(transform, float) @ basis, reduced)
    det_t = round(np.linalg.det(np.asarray(transform, float)))
    assert det_t in (1, -1)
    # Lovasz-type quality: first vector within 2^{n} of the shortest
    n1 = float(reduced[0] @ reduced[0])
    assert n1 <= 2.0 ** 4 * brute_shortest(basis) + 1e-6


def test_gram_schmidt_factorization():
    rng = np.random.default_rng(3)
    basis = random_basis(rng, 4)
    mu, cnorm = gram_schmidt(basis)
    # Gram matrix factors as mu * diag(cnorm) * mu^T
    gram = basis @ basis.T
    assert np.allclose(mu @ np.diag(cnorm) @ mu.T, gram, atol=1e-8)
    assert np.allclose(np.diag(mu), 1.0)
    assert np.all(cnorm > 0)


def test_lattice_points_near_matches_brute_force():
    basis = np.array([[1.0, 0.3], [0.0, 1.2]])
    target = np.array([0.4, -0.7])
    r_sq = 4.0
    got = set(lattice_points_near(basis, target, r_sq))
    brute = set()
    for a in range(-8, 9):
        for b in range(-8, 9):
            v = np.array([a, b], float) @ basis - target
            if float(v @ v) <= r_sq + 1e-9:
                brute.add((a, b))
    assert got == brute


def test_lattice_points_near_rank_zero():
    basis = np.zeros((0, 2))
    assert lattice_points_near(basis, np.array([0.1, 0.1]), 1.0) == [()]
    assert lattice_points_near(basis, np.array([3.0, 0.0]), 1.0) == []
