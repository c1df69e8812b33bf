"""Prime and integral ideal machinery, checked against Gaussian-integer counting."""

import sympy

from modlat.fieldcore import make_field
from modlat.ideals import (integral_ideals_up_to, minkowski_rows,
                           prime_ideals_up_to)


def test_minkowski_rows_gram_is_trace_form():
    import numpy as np
    fld = make_field(8)
    rows = minkowski_rows(fld)
    gram = rows @ rows.T
    # Gram entry (i, j) is Tr(zeta^i * conj(zeta^j)); for zeta_8 that is
    # d = 4 on the diagonal and 0 off it (power basis is trace-orthogonal)
    assert np.allclose(gram, 4.0 * np.eye(4), atol=1e-9)


def test_prime_ideal_degrees_match_splitting():
    fld = make_field(16)
    for ideal in prime_ideals_up_to(fld, 300):
        assert ideal.norm == ideal.p ** ideal.f
        if fld.m % ideal.p != 0:
            assert ideal.f == sympy.n_order(ideal.p, 16)
        gen_norm = abs(ideal.generator.signed_norm())
        assert gen_norm == ideal.norm
        assert ideal.generator.is_integral()


def gaussian_ideal_count(n: int) -> int:
    """Number of ideals of Z[i] with norm exactly n: lattice points with
    a >= 1, b >= 0 and a^2 + b^2 = n."""
    count = 0
    for a in range(1, int(n ** 0.5) + 1):
        rest = n - a * a
        b = int(round(rest ** 0.5))
        if rest >= 0 and b * b == rest:
            count += 1
    return count


def test_integral_ideal_counts_match_gaussian_oracle():
    fld = make_field(4)
    ideals = integral_ideals_up_to(fld, 100)
    by_norm = {}
    for ideal in ideals:
        by_norm[ideal.norm] = by_norm.get(ideal.norm, 0) + 1
    for n in range(1, 101):
        expected = 1 if n == 1 else gaussian_ideal_count(n)
        assert by_norm.get(n, 0) == expected, f"norm {n}"


def test_integral_ideal_generators_and_ordering():
    fld = make_field(8)
    ideals = integral_ideals_up_to(fld, 60)
    keys = [i.key for i in ideals]
    assert keys == sorted(keys)
    assert ideals[0].is_unit_ideal
    for ideal in ideals:
        assert abs(ideal.generator.signed_norm()) == ideal.norm
        assert ideal.generator.is_integral()


def test_coprimality_via_supports():
    fld = make_field(4)
    ideals = integral_ideals_up_to(fld, 30)
    by_norm = {}
    for i in ideals:
        by_norm.setdefault(i.norm, []).append(i)
    two = by_norm[2][0]       # ramified prime above 2
    five_a, five_b = by_norm[5]  # the two primes above 5
    assert two.coprime_to(five_a)
    assert five_a.coprime_to(five_b)  # distinct conjugate primes are coprime
    assert not two.coprime_to(two)
    four = [i for i in by_norm[4] if not i.coprime_to(two)]
    assert four  # norm-4 ideal shares support with the prime above 2
