import math
from fractions import Fraction

import numpy as np
import pytest

from fareychain import thermo, twisted
from fareychain.rings import Params


def test_mu_specializations():
    known_mu = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert [twisted.mu_twisted(1, q) for q in range(1, 11)] == known_mu
    known_phi = [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]
    assert [twisted.mu_twisted(0, q) for q in range(1, 11)] == known_phi
    for q in range(1, 101):
        assert twisted.mu_twisted(1, q) == twisted.moebius(q)
        assert twisted.mu_twisted(0, q) == twisted.euler_phi(q)


def test_mu_direct_example():
    # q = 4, m = 2: units 1, 3 give e^(i pi) + e^(3 i pi) = -2
    assert twisted.mu_twisted(2, 4, "direct") == -2
    assert twisted.mu_twisted(2, 4, "closed") == -2


def test_mu_closed_equals_direct():
    for q in range(1, 501):
        for m in (0, 1, 2, 3, 8, 20, -5):
            assert twisted.mu_twisted(m, q, "closed") == twisted.mu_twisted(m, q, "direct")


def test_mu_symmetric_in_sign():
    for m in range(0, 51, 5):
        for q in range(1, 200, 7):
            assert twisted.mu_twisted(-m, q) == twisted.mu_twisted(m, q)


def test_mu_multiplicative():
    import random

    rng = random.Random(0)
    for _ in range(400):
        q1, q2 = rng.randint(1, 100), rng.randint(1, 100)
        if math.gcd(q1, q2) != 1:
            continue
        m = rng.randint(0, 12)
        assert twisted.mu_twisted(m, q1 * q2) == twisted.mu_twisted(m, q1) * twisted.mu_twisted(m, q2)


def test_totient_ratio_bound():
    for q in range(1, 2001):
        for m in range(1, 21):
            g = math.gcd(m, q)
            assert twisted.euler_phi(q) // twisted.euler_phi(q // g) <= m


def test_factored_fallback_beyond_sieve():
    # primes above the sieve limit go through trial division
    assert twisted._phi_factored(97) == 96
    assert twisted._mu_factored(30) == -1
    assert twisted._mu_factored(12) == 0


def test_dirichlet_partials():
    val, tail = twisted.dirichlet_partial(1, 2.0, 100_000)
    assert abs(val - 6.0 / math.pi**2) <= 1e-4
    assert tail >= 0
    val0, _ = twisted.dirichlet_partial(0, 3.0, 100_000)
    zeta2 = math.pi**2 / 6.0
    zeta3 = 1.2020569031595942854
    assert abs(val0 - zeta2 / zeta3) <= 1e-4


def test_dirichlet_domain_checks():
    with pytest.raises(ValueError):
        twisted.dirichlet_partial(0, 1.5, 100)
    with pytest.raises(ValueError):
        twisted.dirichlet_partial(3, 0.9, 100)


def test_twisted_at_m_zero_is_canonical():
    p = Params.floating(0.5)
    for n in (2, 6, 10):
        assert twisted.twisted_Z(n, 2.0, 0, p).real == pytest.approx(
            thermo.canonical_Z(n, 2.0, p), rel=1e-14
        )
        assert abs(twisted.twisted_Z(n, 2.0, 0, p).imag) <= 1e-12


def test_twisted_dual_routes_agree():
    for r in (0.0, 0.6, 1.0):
        p = Params.floating(r)
        for m in (0, 1, 2, -3):
            for n in range(2, 13, 2):
                a = twisted.twisted_Z(n, 2.6, m, p)
                b = twisted.twisted_Z(n, 2.6, m, p, "transfer")
                assert abs(a - b) <= 1e-11


def test_twisted_conjugate_symmetry():
    p = Params.floating(0.7)
    a = twisted.twisted_Z(8, 2.0, 3, p)
    b = twisted.twisted_Z(8, 2.0, -3, p)
    assert a == pytest.approx(b.conjugate(), rel=1e-13)


def test_farey_twisted_approaches_inverse_zeta():
    # partial sums of mu(q)/q^s over the rational tree
    val = twisted.twisted_Z(16, 6.0, 1, Params.floating(1.0))
    assert abs(val.real - 945.0 / math.pi**6) <= 1e-2
    assert abs(val.imag) <= 1e-12
