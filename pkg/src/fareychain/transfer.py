"""Iterates, traces and spectral data of the weighted transfer operator.

The operator acts on functions of [0, 1] as

    (P_{s,r} f)(x) = rho^s / (rho + r x)^(2s) * [f(Phi_0 x) + f(Phi_1 x)]

with the two inverse branches Phi_j and rho = 2 - r.  Its n-th iterate
applied to simple test functions collapses to closed sums over the
2^(n-1) vertices of the n-th extended tree row, and its traces collapse
to sums over tree leaves of the matrix-presentation traces (T_0, T_1).
Every closed form here is paired with a brute-force branch-word oracle
that sums over all 2^n inverse-branch compositions directly.

All leaf folds stream over the index space in fixed-size blocks, so
large n costs time but bounded memory; float reductions use numpy's
pairwise summation (scalar accumulations use compensated sums).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .maps import involution_s
from .rings import Params, csum_complex
from .spinchain import iter_pq_rows, pq_tables

BRUTE_CAP = 20
LEAF_CAP = 26
_CHUNK_LEVELS = 20


@dataclass(frozen=True)
class TransferQuery:
    """Evaluation request: weight exponent s, parameter r, power n."""

    s: complex
    r: float
    n: int

    def __post_init__(self):
        if not 0 <= self.r < 2:
            raise ValueError("r must lie in [0, 2)")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def rho(self) -> float:
        return 2.0 - self.r


def _cpow(base, expo):
    """base**expo for positive real base and complex expo (principal branch)."""
    if isinstance(expo, complex) and expo.imag == 0:
        expo = expo.real
    if isinstance(base, np.ndarray):
        if isinstance(expo, complex):
            return np.exp(expo * np.log(base))
        return base**expo
    if isinstance(expo, complex):
        return cmath.exp(expo * math.log(base))
    return base**expo


# ---------------------------------------------------------------------------
# Extended-row leaf streams
# ---------------------------------------------------------------------------


def _pair_blocks(n: int, r: float) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Stream the (p, q) pairs of the n-th extended row in blocks.

    The row is generated from the root pair (1, 1) by the two-child
    step (p, q) -> (p + rho q, rho q) and ((r-1) p + rho q, r p + rho q);
    n = 1 is the root itself.  Deep rows are walked depth-first with a
    scalar prefix so that at most 2^_CHUNK_LEVELS pairs are in memory.
    """
    if n > LEAF_CAP:
        raise ValueError(f"n={n} exceeds the leaf-stream cap {LEAF_CAP}")
    rho = 2.0 - r

    def expand(p0: float, q0: float, levels: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        if levels <= _CHUNK_LEVELS:
            p = np.array([p0])
            q = np.array([q0])
            for _ in range(levels):
                pa = p + rho * q
                qa = rho * q
                pb = (r - 1.0) * p + rho * q
                qb = r * p + rho * q
                p = np.concatenate([pa, pb])
                q = np.concatenate([qa, qb])
            yield p, q
        else:
            yield from expand(p0 + rho * q0, rho * q0, levels - 1)
            yield from expand((r - 1.0) * p0 + rho * q0, r * p0 + rho * q0, levels - 1)

    yield from expand(1.0, 1.0, n - 1)


def _quad_blocks(n: int, r: float) -> Iterator[Tuple[np.ndarray, ...]]:
    """Like :func:`_pair_blocks` but also carrying the (mu, nu) bookkeeping
    needed to track where characters are evaluated; root carries (1, 0)."""
    if n > LEAF_CAP:
        raise ValueError(f"n={n} exceeds the leaf-stream cap {LEAF_CAP}")
    rho = 2.0 - r

    def expand(state, levels):
        if levels <= _CHUNK_LEVELS:
            p, q, mu, nu = (np.array([v]) for v in state)
            for _ in range(levels):
                pa, qa = p + rho * q, rho * q
                mua, nua = mu + r * rho * nu, rho * nu
                pb, qb = (r - 1.0) * p + rho * q, r * p + rho * q
                mub, nub = (r - 1.0) * mu + r * rho * nu, mu + rho * nu
                p = np.concatenate([pa, pb])
                q = np.concatenate([qa, qb])
                mu = np.concatenate([mua, mub])
                nu = np.concatenate([nua, nub])
            yield p, q, mu, nu
        else:
            p0, q0, m0, n0 = state
            childA = (p0 + rho * q0, rho * q0, m0 + r * rho * n0, rho * n0)
            childB = ((r - 1.0) * p0 + rho * q0, r * p0 + rho * q0,
                      (r - 1.0) * m0 + r * rho * n0, m0 + rho * n0)
            yield from expand(childA, levels - 1)
            yield from expand(childB, levels - 1)

    yield from expand((1.0, 1.0, 1.0, 0.0), n - 1)


def extended_pairs(n: int, params: Params) -> List[Tuple]:
    """The (p, q) pairs of the n-th extended row in the active ring.

    Object-mode counterpart of :func:`_pair_blocks` for exact and
    symbolic arithmetic (n = 1 is the root pair (1, 1)); used by the
    exact transfer-identity routes and by cross-construction tests.
    """
    if n - 1 > 16:
        raise ValueError("exact extended rows capped at n = 17")
    one = params.one
    r, rho = params.r, params.rho
    pairs = [(one, one)]
    for _ in range(n - 1):
        nxt = []
        for p0, q0 in pairs:
            nxt.append((p0 + rho * q0, rho * q0))
            nxt.append(((r - 1) * p0 + rho * q0, r * p0 + rho * q0))
        pairs = nxt
    return pairs


def _matrix_blocks(n: int, r: float) -> Iterator[Tuple[np.ndarray, ...]]:
    """Stream the matrix entries (a, b, c, d) of X = L M_1 ... M_{n-1}
    over all leaves of tree row n, in blocks."""
    if n > LEAF_CAP:
        raise ValueError(f"n={n} exceeds the leaf-stream cap {LEAF_CAP}")
    rho = 2.0 - r

    def expand(state, levels):
        if levels <= _CHUNK_LEVELS:
            a, b, c, d = (np.array([v]) for v in state)
            for _ in range(levels):
                aL, bL = a + b * (2.0 - rho), b * rho
                cL, dL = c + d * (2.0 - rho), d * rho
                aR, bR = a, (a + b) * rho
                cR, dR = c, (c + d) * rho
                a = np.concatenate([aL, aR])
                b = np.concatenate([bL, bR])
                c = np.concatenate([cL, cR])
                d = np.concatenate([dL, dR])
            yield a, b, c, d
        else:
            a0, b0, c0, d0 = state
            left = (a0 + b0 * (2.0 - rho), b0 * rho, c0 + d0 * (2.0 - rho), d0 * rho)
            right = (a0, (a0 + b0) * rho, c0, (c0 + d0) * rho)
            yield from expand(left, levels - 1)
            yield from expand(right, levels - 1)

    yield from expand((1.0, 0.0, 2.0 - rho, rho), n - 1)


# ---------------------------------------------------------------------------
# Brute-force branch-word oracle
# ---------------------------------------------------------------------------


def apply_bruteforce(f: Callable, x: float, q: TransferQuery, signed: bool = False) -> complex:
    """(P^n f)(x) summed directly over all 2^n inverse-branch words.

    The independent oracle for every closed iterate formula: each word
    contributes prod |Phi'|^s along the composition times f at the
    composed point (times (-1)^(#right-branches) when `signed`).
    """
    if q.n > BRUTE_CAP:
        raise ValueError(f"n={q.n} exceeds the brute-force cap {BRUTE_CAP}")
    r, rho, s, n = q.r, q.rho, complex(q.s), q.n
    terms = []
    for word in range(1 << n):
        y = x
        log_weight = 0.0
        for i in range(n):
            bit = (word >> i) & 1
            den = rho + r * y
            log_weight += math.log(rho) - 2.0 * math.log(den)
            y = y / den
            if bit:
                y = 1.0 - y
        weight = cmath.exp(s * log_weight)
        if signed and word.bit_count() % 2 == 1:
            weight = -weight
        terms.append(weight * f(y))
    return csum_complex(terms)


# ---------------------------------------------------------------------------
# Closed iterate formulas
# ---------------------------------------------------------------------------


def iterate_one(x: float, q: TransferQuery) -> complex:
    """(P^n 1)(x) = 2 rho^(ns) * sum over the n-th extended row of
    (p r x + rho q)^(-2s)."""
    s = complex(q.s)
    total = 0.0 + 0.0j
    for p_arr, q_arr in _pair_blocks(q.n, q.r):
        base = p_arr * (q.r * x) + q.rho * q_arr
        total += np.sum(_cpow(base, -2.0 * s))
    return 2.0 * _cpow(q.rho, q.n * s) * total


def iterate_character(x: float, q: TransferQuery, m: int) -> complex:
    """(P^n e_m)(x) for the character e_m(y) = exp(2 pi i m y).

    Each extended-row vertex carries a split (n_0, n_1) of its weight
    denominator, n_0 + n_1 = p r x + rho q, built by the same two-child
    recursion; the vertex contributes [e_m(n_0/den) + e_m(n_1/den)] *
    den^(-2s).  m = 0 reduces to :func:`iterate_one`.
    """
    s = complex(q.s)
    if m == 0:
        return iterate_one(x, q)
    total = 0.0 + 0.0j
    two_pi_m = 2.0j * math.pi * m
    for p_arr, q_arr, mu, nu in _quad_blocks(q.n, q.r):
        den = p_arr * (q.r * x) + q.rho * q_arr
        n0 = mu * x + q.rho * nu
        n1 = den - n0
        phases = np.exp(two_pi_m * (n0 / den)) + np.exp(two_pi_m * (n1 / den))
        total += np.sum(_cpow(den, -2.0 * s) * phases)
    return _cpow(q.rho, q.n * s) * total


def affine_tables(k: int, r: float) -> Tuple[np.ndarray, np.ndarray]:
    """The affine-coefficient tables (s_k, t_k) over k-bit words.

    s_0 = (1,), t_0 = (0,), extended by prepending a bit with the same
    complement-flip pattern as the vertex recursions.  They describe
    where the k+1-st iterate evaluates its argument away from x = 1.
    """
    s = np.array([1.0])
    t = np.array([0.0])
    rho = 2.0 - r
    for _ in range(k):
        s_rev, t_rev = s[::-1], t[::-1]
        s_hi = (r - 1.0) * s_rev + rho * t_rev
        t_lo = r * s + rho * t
        t_hi = r * s_rev + rho * t_rev
        s = np.concatenate([s, s_hi])
        t = np.concatenate([t_lo, t_hi])
    return s, t


def iterate_general(f: Callable, x: float, s: complex, r: float, k: int) -> complex:
    """(P^(k+1) f)(x) via the level-k leaf formula for arbitrary f.

    The 2^(k+1) branch-word matrices are exactly

        [[s_{k+1}(tau), p_k(sigma) - s_{k+1}(tau)],
         [t_{k+1}(tau), q_k(sigma) - t_{k+1}(tau)]]

    over tau in (Z/2Z)^(k+1) with sigma its leading k bits, so writing
    u = 1 - x each tau contributes

        (q_k(sigma) - u t_{k+1}(tau))^(-2s)
            * f( (p_k(sigma) - u s_{k+1}(tau)) / (q_k(sigma) - u t_{k+1}(tau)) )

    times rho^((k+1)s).  At x = 1 this collapses to twice the plain
    leaf sum of q_k^(-2s) f(p_k/q_k).  `f` is applied to numpy arrays.
    """
    if k + 1 > LEAF_CAP:
        raise ValueError("k exceeds the leaf cap")
    s = complex(s)
    table = pq_tables(k, Params.floating(r))
    p_arr = np.asarray(table.p, dtype=float)
    q_arr = np.asarray(table.q, dtype=float)
    s_tab, t_tab = affine_tables(k + 1, r)
    s_pairs = s_tab.reshape(-1, 2)
    t_pairs = t_tab.reshape(-1, 2)
    u = 1.0 - x
    total = 0.0 + 0.0j
    for i in (0, 1):
        den = q_arr - u * t_pairs[:, i]
        args = (p_arr - u * s_pairs[:, i]) / den
        total += np.sum(_cpow(den, -2.0 * s) * _apply(f, args))
    return _cpow(2.0 - r, (k + 1) * s) * total


def _apply(f: Callable, arr: np.ndarray) -> np.ndarray:
    try:
        out = f(arr)
        return np.asarray(out)
    except Exception:
        return np.array([f(v) for v in arr])


# ---------------------------------------------------------------------------
# Traces and periodic-orbit sums
# ---------------------------------------------------------------------------


def trace_power(q: TransferQuery, signed: bool = False) -> complex:
    """trace(P^n) (or of the signed operator) via the leaf trace pairs.

    Each leaf of tree row n contributes, for j = 0, 1,

        (+-1)^j rho^(ns) / sqrt(T_j^2 - (-1)^j 4 rho^n)
            * (2 / (T_j + sqrt(T_j^2 - (-1)^j 4 rho^n)))^(2s-1)

    where T_0 = trace X and T_1 = trace XS.  Trace-class only for
    r < 1; the all-left leaf term diverges as r -> 1.
    """
    if q.r >= 1:
        raise ValueError("traces require r < 1 (divergent as r -> 1)")
    s = complex(q.s)
    rho_n = q.rho**q.n
    pref = _cpow(q.rho, q.n * s)
    total = 0.0 + 0.0j
    for a, b, c, d in _matrix_blocks(q.n, q.r):
        T0 = a + d
        T1 = a * (q.r - 1.0) + b * q.r + c * (2.0 - q.r) + d * (1.0 - q.r)
        s0 = np.sqrt(T0 * T0 - 4.0 * rho_n)
        s1 = np.sqrt(T1 * T1 + 4.0 * rho_n)
        term0 = _cpow(2.0 / (T0 + s0), 2.0 * s - 1.0) / s0
        term1 = _cpow(2.0 / (T1 + s1), 2.0 * s - 1.0) / s1
        total += np.sum(term0) + (-1.0 if signed else 1.0) * np.sum(term1)
    return pref * total


def periodic_sum_xi(q: TransferQuery) -> complex:
    """The dynamical partition function Xi_n(s) over period-n points.

    Xi_n(s) = sum over period-n points of |(F^n)'|^(-s); in leaf data,

        sum_leaves sum_j 4^s rho^(ns) / (T_j + sqrt(T_j^2 - (-1)^j 4 rho^n))^(2s).

    Unlike the traces this stays finite at r = 1.
    """
    if q.r > 1:
        raise ValueError("periodic sums implemented for r <= 1")
    s = complex(q.s)
    rho_n = q.rho**q.n
    pref = _cpow(4.0, s) * _cpow(q.rho, q.n * s)
    total = 0.0 + 0.0j
    for a, b, c, d in _matrix_blocks(q.n, q.r):
        T0 = a + d
        T1 = a * (q.r - 1.0) + b * q.r + c * (2.0 - q.r) + d * (1.0 - q.r)
        s0 = np.sqrt(np.maximum(T0 * T0 - 4.0 * rho_n, 0.0))
        s1 = np.sqrt(T1 * T1 + 4.0 * rho_n)
        total += np.sum(_cpow(T0 + s0, -2.0 * s)) + np.sum(_cpow(T1 + s1, -2.0 * s))
    return pref * total


def _word_matrix(word: int, n: int, r: float) -> Tuple[float, float, float, float]:
    rho = 2.0 - r
    mats = (
        (1.0, 0.0, 2.0 - rho, rho),  # left branch
        (1.0 - rho, rho, 2.0 - rho, rho),  # right branch
    )
    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    for i in range(n):
        bit = (word >> (n - 1 - i)) & 1
        ma, mb, mc, md = mats[bit]
        a, b, c, d = a * ma + b * mc, a * mb + b * md, c * ma + d * mc, c * mb + d * md
    return a, b, c, d


def _branch_fixed_point(a: float, b: float, c: float, d: float) -> float:
    """The unique fixed point in [0, 1] of the Moebius contraction."""
    if abs(c) < 1e-14:
        return b / (d - a)
    disc = (d - a) ** 2 + 4.0 * c * b
    sq = math.sqrt(disc)
    for sign in (1.0, -1.0):
        x = (-(d - a) + sign * sq) / (2.0 * c)
        if -1e-12 <= x <= 1.0 + 1e-12:
            return min(max(x, 0.0), 1.0)
    raise ArithmeticError("no fixed point in [0, 1]")


def trace_power_bruteforce(q: TransferQuery, signed: bool = False) -> complex:
    """Fixed-point oracle: sum over branch words of |psi'(x*)|^s / (1 - psi'(x*))."""
    if q.n > BRUTE_CAP:
        raise ValueError(f"n={q.n} exceeds the brute-force cap {BRUTE_CAP}")
    s = complex(q.s)
    rho_n = q.rho**q.n
    terms = []
    for word in range(1 << q.n):
        a, b, c, d = _word_matrix(word, q.n, q.r)
        x = _branch_fixed_point(a, b, c, d)
        det = rho_n if word.bit_count() % 2 == 0 else -rho_n
        deriv = det / (c * x + d) ** 2
        term = _cpow(abs(deriv), s) / (1.0 - deriv)
        if signed and word.bit_count() % 2 == 1:
            term = -term
        terms.append(term)
    return csum_complex(terms)


def periodic_sum_bruteforce(q: TransferQuery) -> complex:
    """Periodic-point oracle: sum over branch words of |psi'(x*)|^s."""
    if q.n > BRUTE_CAP:
        raise ValueError(f"n={q.n} exceeds the brute-force cap {BRUTE_CAP}")
    s = complex(q.s)
    rho_n = q.rho**q.n
    terms = []
    for word in range(1 << q.n):
        a, b, c, d = _word_matrix(word, q.n, q.r)
        x = _branch_fixed_point(a, b, c, d)
        deriv = rho_n / (c * x + d) ** 2
        terms.append(_cpow(abs(deriv), s))
    return csum_complex(terms)


# ---------------------------------------------------------------------------
# Fredholm determinant and dynamical zeta function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FredholmZeta:
    """det(1 - z P_s), det(1 - z P~_{s+1}), and the zeta function both ways."""

    z: complex
    s: complex
    r: float
    truncation: int
    det: complex
    det_signed_shift: complex
    zeta_exp: complex
    zeta_ratio: complex
    tail_estimate: float
    converged: bool


def _newton_coefficients(traces: Sequence[complex]) -> np.ndarray:
    """Power-series coefficients of det(1 - z P) from trace(P^n).

    d_0 = 1, d_m = -(1/m) sum_{j<=m} trace(P^j) d_{m-j}; the series is
    entire, so the truncated polynomial is usable beyond the radius of
    the defining exponential sum.
    """
    N = len(traces)
    d = np.zeros(N + 1, dtype=complex)
    d[0] = 1.0
    for m_idx in range(1, N + 1):
        acc = sum(traces[j - 1] * d[m_idx - j] for j in range(1, m_idx + 1))
        d[m_idx] = -acc / m_idx
    return d


def fredholm_coefficients(s: complex, r: float, N: int, signed: bool = False) -> np.ndarray:
    traces = [trace_power(TransferQuery(s, r, n), signed=signed) for n in range(1, N + 1)]
    return _newton_coefficients(traces)


def fredholm_and_zeta(z: complex, s: complex, r: float, N: int = 14, tol: float = 1e-9) -> FredholmZeta:
    """Evaluate det(1 - z P_s), the shifted signed determinant, and zeta.

    zeta is computed two independent ways: from the periodic-orbit sums
    as exp(sum z^n Xi_n / n), and as the determinant ratio
    det(1 - z P~_{s+1}) / det(1 - z P_s); inside the truncation-validated
    radius the two must agree.

    The Xi_n converge geometrically, Xi_n ~ c g^n, so the exponential
    route adds the closed tail of the fitted geometric sequence
    (c sum_{n>N} (z g)^n / n via the log series); the quoted tail
    estimate bounds what remains after that correction, from the
    deviation of the last Xi from the fit.  The determinants use the
    entire power series of the trace data (Plemelj-Smithies
    coefficients), which converges for every z.
    """
    if r >= 1:
        raise ValueError("determinants require r < 1")
    queries = [TransferQuery(s, r, n) for n in range(1, N + 1)]
    tr = [trace_power(qq) for qq in queries]
    tr_signed = [trace_power(TransferQuery(s + 1, r, n), signed=True) for n in range(1, N + 1)]
    xi = [periodic_sum_xi(qq) for qq in queries]
    d = _newton_coefficients(tr)
    d_sgn = _newton_coefficients(tr_signed)
    powers = z ** np.arange(N + 1)
    det = complex(np.sum(d * powers))
    det_sgn = complex(np.sum(d_sgn * powers))
    log_zeta = sum((z**n) * xi[n - 1] / n for n in range(1, N + 1))
    tail = math.inf
    if N >= 3 and xi[-2] != 0:
        g = xi[-1] / xi[-2]
        zg = z * g
        if abs(zg) < 1.0:
            c = xi[-1] / g**N
            head = sum(zg**n / n for n in range(1, N + 1))
            log_zeta += c * (-cmath.log(1.0 - zg) - head)
            # what the geometric fit misses, propagated through the same sum
            g_prev = xi[-2] / xi[-3]
            dev = abs(xi[-1] - g_prev * xi[-2])
            tail = dev * abs(z) ** (N + 1) / (N + 1) / max(1.0 - min(abs(zg), 0.99), 0.01)
    zeta_exp = cmath.exp(log_zeta)
    zeta_ratio = det_sgn / det
    return FredholmZeta(
        z=z, s=s, r=r, truncation=N, det=det, det_signed_shift=det_sgn,
        zeta_exp=zeta_exp, zeta_ratio=zeta_ratio, tail_estimate=tail,
        converged=tail <= tol,
    )


def smallest_determinant_zero(s: float, r: float, N: int = 18) -> float:
    """Smallest positive zero of det(1 - z P_s); its inverse is the
    leading eigenvalue.  Newton iteration on the truncated entire series."""
    d = fredholm_coefficients(s, r, N).real
    dp = d[1:] * np.arange(1, N + 1)
    z = 1.0 / max(spectral_radius(s, r).value, 1e-12)
    for _ in range(80):
        f = float(np.polyval(d[::-1], z))
        fp = float(np.polyval(dp[::-1], z))
        if fp == 0:
            break
        step = f / fp
        z -= step
        if abs(step) < 1e-14 * max(1.0, abs(z)):
            break
    return z


# ---------------------------------------------------------------------------
# Reference eigenvalue sequences
# ---------------------------------------------------------------------------


def mn_spectra(s: complex, r: float, K: int) -> Tuple[np.ndarray, np.ndarray]:
    """First K eigenvalues of the two integral-operator families.

    mu_k = rho^-(s+k) (requires r < 1) and
    nu_k = (-1)^k (4 rho / (1 + sqrt(1+4 rho))^2)^(s+k); their full
    geometric sums reconstruct trace(P_{s,r}).
    """
    if r >= 1:
        raise ValueError("the mu family requires r < 1")
    rho = 2.0 - r
    ks = np.arange(K)
    mu = np.array([_cpow(rho, -(s + k)) for k in ks])
    beta = 4.0 * rho / (1.0 + math.sqrt(1.0 + 4.0 * rho)) ** 2
    nu = np.array([(-1.0) ** k * _cpow(beta, s + k) for k in ks])
    return mu, nu


def trace_from_spectra(s: complex, r: float) -> complex:
    """trace(P_{s,r}) = sum mu_k + sum nu_k, summed in closed form."""
    rho = 2.0 - r
    beta = 4.0 * rho / (1.0 + math.sqrt(1.0 + 4.0 * rho)) ** 2
    return _cpow(rho, -s) / (1.0 - 1.0 / rho) + _cpow(beta, s) / (1.0 + beta)


def trace_closed_n1(s: complex, r: float) -> complex:
    """The closed n = 1 trace: rho^(1-s)/(rho-1) plus the branch-point term."""
    rho = 2.0 - r
    root = math.sqrt(1.0 + 4.0 * rho)
    return _cpow(rho, 1 - s) / (rho - 1.0) + _cpow(rho, s) / root * _cpow(
        2.0 / (1.0 + root), 2.0 * s - 1.0
    )


# ---------------------------------------------------------------------------
# Spectral radius
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralRadius:
    value: float
    error: float
    method: str
    iterations: int


def _aitken(x: np.ndarray) -> np.ndarray:
    d1 = x[1:-1] - x[:-2]
    d2 = x[2:] - 2.0 * x[1:-1] + x[:-2]
    safe = np.where(np.abs(d2) > 1e-300, d2, 1.0)
    out = x[:-2] - d1 * d1 / safe
    return np.where(np.abs(d2) > 1e-300, out, x[2:])


def power_ratio_sequence(s: float, r: float, n_max: int) -> np.ndarray:
    """Ratios a_{n+1}/a_n of a_n = (P^n 1)(1), computed from row sums."""
    a = []
    rho = 2.0 - r
    for k, _p, q_arr in iter_pq_rows(n_max - 1, r):
        n = k + 1
        a.append(2.0 * rho ** (n * s) * float(np.sum(q_arr ** (-2.0 * s))))
    a = np.array(a)
    return a[1:] / a[:-1]


def collocation_spectrum(s: float, r: float, dim: int = 48) -> np.ndarray:
    """Eigenvalues of the operator compressed to a Chebyshev grid.

    The operator maps functions analytic on a disk containing [0, 1] to
    themselves, so polynomial collocation converges geometrically in
    the dimension; eigenvalues are returned sorted by modulus.
    """
    rho = 2.0 - r
    j = np.arange(dim)
    x = 0.5 * (1.0 - np.cos(np.pi * (j + 0.5) / dim))
    phi0 = x / (rho + r * x)
    phi1 = 1.0 - phi0
    w = rho**s / (rho + r * x) ** (2.0 * s)

    def chebvals(t: np.ndarray) -> np.ndarray:
        return np.polynomial.chebyshev.chebvander(2.0 * t - 1.0, dim - 1)

    B = (w[:, None] * (chebvals(phi0) + chebvals(phi1))) @ np.linalg.inv(chebvals(x))
    ev = np.linalg.eigvals(B)
    return ev[np.argsort(-np.abs(ev))]


def spectral_radius(
    s: float, r: float, tol: float = 1e-10, n_cap: int = 24, method: str = "auto"
) -> SpectralRadius:
    """Leading eigenvalue of P_{s,r} for real s, r < 1.

    ``power``: Aitken-extrapolated power ratios of the exact leaf sums
    a_n = (P^n 1)(1), returned with an honest error bar even if tol is
    not reached by n_cap.  ``collocation``: eigenvalue of the Chebyshev
    compression, error bar from a lower-dimension rerun.  ``auto``
    (default) runs the power ratios first; near r = 1 the subdominant
    eigenvalue ratio approaches 1 and the ratio sequence cannot reach
    tight tolerances by n <= n_cap, so the estimate is then refined by
    collocation and cross-checked against the power ratios.
    """
    if r >= 1:
        raise ValueError("spectral radius requires r < 1")
    if isinstance(s, complex):
        if s.imag != 0:
            raise ValueError("spectral radius is defined here for real s")
        s = s.real
    if method == "collocation":
        return _collocation_radius(s, r)
    est, err, n = _power_radius(s, r, tol, n_cap)
    if err <= tol or method == "power":
        return SpectralRadius(est, err, "power-ratio/aitken", n)
    refined = _collocation_radius(s, r)
    if abs(refined.value - est) > max(10.0 * err, 1e-6):
        raise ArithmeticError(
            f"collocation ({refined.value}) and power ratios ({est}) disagree beyond error bars"
        )
    return SpectralRadius(refined.value, refined.error, "collocation (power-ratio checked)", n)


def _power_radius(s: float, r: float, tol: float, n_cap: int):
    n = min(12, n_cap)
    est_prev: Optional[float] = None
    while True:
        seq = power_ratio_sequence(s, r, n)
        while len(seq) >= 5:
            nxt = _aitken(seq)
            if not np.all(np.isfinite(nxt)):
                break
            seq = nxt
        est = float(seq[-1])
        err = abs(est - float(seq[-2])) if len(seq) >= 2 else math.inf
        if est_prev is not None:
            err = max(err, abs(est - est_prev) * 0.5)
        if err <= tol or n >= n_cap:
            return est, err, n
        est_prev = est
        n = min(n + 4, n_cap)


def _collocation_radius(s: float, r: float) -> SpectralRadius:
    lam = float(np.max(collocation_spectrum(s, r, dim=48).real))
    lam_small = float(np.max(collocation_spectrum(s, r, dim=36).real))
    return SpectralRadius(lam, max(abs(lam - lam_small), 1e-14), "collocation", 48)


def involution_residual(s: float, r: float, grid: Optional[np.ndarray] = None, n: int = 16) -> float:
    """Deviation of the approximate leading eigenfunction from involution symmetry.

    h(x) ~ rho^(-ns) (P^n 1)(x) should satisfy
    (r x + 1 - r)^(-2s) h(S(x)) = h(x); returns the max relative residual
    over the grid.  Vanishes as n grows for r < 1.
    """
    if r >= 1:
        raise ValueError("requires r < 1")
    if grid is None:
        grid = np.linspace(0.0, 1.0, 21)
    p = Params.floating(r)
    pref = (2.0 - r) ** (-n * s)
    q = TransferQuery(s, r, n)
    h_vals = np.array([pref * iterate_one(float(x), q).real for x in grid])
    sx = np.array([involution_s(float(x), p) for x in grid])
    h_s = np.array([pref * iterate_one(float(y), q).real for y in sx])
    ih = (r * grid + 1.0 - r) ** (-2.0 * s) * h_s
    return float(np.max(np.abs(ih - h_vals)) / np.max(np.abs(h_vals)))
