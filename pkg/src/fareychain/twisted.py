"""Character-twisted partition sums and the twisted Moebius function.

The twisted sum Z_n^(m)(s) attaches the phase e^(2 pi i m p/q) to every
tree vertex p/q; for r = 1 and increasing n it tends to the Dirichlet
series of the exponential sum over units

    mu^(m)(q) = sum over p in U(Z/qZ) of e^(2 pi i m p / q),

which has the closed form phi(q)/phi(q/gcd(m,q)) * mu(q/gcd(m,q)) and
specializes to the Moebius function (m = 1) and Euler's totient
(m = 0).  Both routes are implemented and must agree after integer
rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Tuple

import numpy as np

from .rings import Params
from .spinchain import iter_pq_rows
from .transfer import TransferQuery, iterate_character

SIEVE_LIMIT = 1_000_000


@dataclass(frozen=True)
class TwistedSum:
    m: int
    n: int
    s: float
    value: complex


@lru_cache(maxsize=4)
def _sieve(limit: int) -> Tuple[np.ndarray, np.ndarray]:
    """Sieve phi and mu up to `limit` (vectorized over prime strides)."""
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    primes = np.flatnonzero(is_prime)
    phi = np.arange(limit + 1, dtype=np.int64)
    mu = np.ones(limit + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes:
        phi[p::p] -= phi[p::p] // p
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p :: p * p] = 0
    return phi, mu


def euler_phi(q: int) -> int:
    if q < 1:
        raise ValueError("q must be >= 1")
    if q <= SIEVE_LIMIT:
        return int(_sieve(SIEVE_LIMIT)[0][q])
    return _phi_factored(q)


def moebius(q: int) -> int:
    if q < 1:
        raise ValueError("q must be >= 1")
    if q <= SIEVE_LIMIT:
        return int(_sieve(SIEVE_LIMIT)[1][q])
    return _mu_factored(q)


def _factor(q: int):
    out = []
    d = 2
    while d * d <= q:
        if q % d == 0:
            e = 0
            while q % d == 0:
                q //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if q > 1:
        out.append((q, 1))
    return out


def _phi_factored(q: int) -> int:
    out = 1
    for p, e in _factor(q):
        out *= (p - 1) * p ** (e - 1)
    return out


def _mu_factored(q: int) -> int:
    fs = _factor(q)
    if any(e > 1 for _p, e in fs):
        return 0
    return -1 if len(fs) % 2 else 1


def mu_twisted(m: int, q: int, method: str = "closed") -> int:
    """The twisted Moebius value mu^(m)(q), by either route.

    ``closed``: phi(q)/phi(q') * mu(q') with q' = q/gcd(m, q); handles
    m = 0 through gcd(0, q) = q, giving phi(q).  ``direct``: the unit
    exponential sum, summed in double precision and rounded; a residual
    above 1e-6 from an integer flags a bug.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if method == "closed":
        g = gcd(abs(m), q)
        q_red = q // g
        return euler_phi(q) // euler_phi(q_red) * moebius(q_red)
    if method == "direct":
        units = _units(q)
        phases = np.exp((2j * math.pi * (m % q if q > 1 else 0) / q) * units)
        total = complex(np.sum(phases))
        if abs(total.imag) > 1e-6 or abs(total.real - round(total.real)) > 1e-6:
            raise ArithmeticError(f"unit sum for q={q}, m={m} is not near an integer: {total}")
        return int(round(total.real))
    raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=4096)
def _units_cached(q: int) -> np.ndarray:
    if q == 1:
        return np.array([0.0])
    ks = np.arange(1, q, dtype=np.int64)
    return ks[np.gcd(ks, q) == 1].astype(float)


def _units(q: int) -> np.ndarray:
    return _units_cached(q)


def unit_exponential_sums(q: int, ms: np.ndarray) -> np.ndarray:
    """sum over units p of e^(2 pi i m p / q) for all m in `ms` at once."""
    u = _units(q)
    angles = (2.0 * math.pi / q) * np.outer(np.mod(ms, q) if q > 1 else np.zeros_like(ms), u)
    return np.exp(1j * angles).sum(axis=1)


def dirichlet_partial(m: int, s: float, Q: int) -> Tuple[float, float]:
    """Partial sum of sum_q mu^(m)(q) q^(-s) up to Q, with a tail bound.

    For m != 0 the values are bounded by |m| (the totient ratio is at
    most |m| and the Moebius factor is at most 1 in modulus), so the
    tail is below |m| Q^(1-s)/(s-1) for s > 1; for m = 0 the summand is
    phi(q) q^(-s) and the bound needs s > 2.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    if m == 0:
        if s <= 2:
            raise ValueError("m = 0 requires s > 2 for convergence")
    elif s <= 1:
        raise ValueError("m != 0 requires s > 1 for convergence")
    limit = min(Q, SIEVE_LIMIT)
    phi, mu = _sieve(SIEVE_LIMIT)
    qs = np.arange(1, limit + 1, dtype=np.int64)
    g = np.gcd(abs(m), qs)
    q_red = qs // g
    vals = (phi[qs] // phi[q_red]) * mu[q_red]
    total = float(np.sum(vals * qs ** (-float(s))))
    for q in range(limit + 1, Q + 1):  # beyond the sieve: factor on demand
        total += mu_twisted(m, q) * q ** (-s)
    bound = max(abs(m), 1)
    if m == 0:
        tail = Q ** (2.0 - s) / (s - 2.0)
    else:
        tail = bound * Q ** (1.0 - s) / (s - 1.0)
    return total, tail


def twisted_Z(n: int, s: float, m: int, params: Params, method: str = "rows") -> complex:
    """Twisted partition sum Z_n^(m)(s) = sum over tree vertices of
    q^(-s) e^(2 pi i m p/q)  (the vertex 1/1 contributes 1).

    ``rows`` sums the tree tables directly; ``transfer`` uses the
    character-iterate identity 2 Z_n^(m)(2s) = 1 + sum_{k<=n}
    rho^(-ks) (P^k e_m)(1).  m = 0 recovers the canonical partition
    function.
    """
    p = params.as_float()
    r = p.r_float
    if method == "rows":
        total = 1.0 + 0.0j
        two_pi_m = 2j * math.pi * m
        for k, p_arr, q_arr in iter_pq_rows(n - 1, r):
            total += complex(np.sum(q_arr ** (-float(s)) * np.exp(two_pi_m * (p_arr / q_arr))))
        return total
    if method == "transfer":
        u = s / 2.0
        rho = 2.0 - r
        total = 2.0 + 0.0j  # leading 1 plus the k = 0 term e_m(1) = 1
        for k in range(1, n + 1):
            total += rho ** (-k * u) * iterate_character(1.0, TransferQuery(u, r, k), m)
        return total / 2.0
    raise ValueError(f"unknown method {method!r}")
