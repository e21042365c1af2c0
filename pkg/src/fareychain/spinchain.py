"""Spin-chain tables over (Z/2Z)^k and their hypercube Fourier analysis.

The level-k leaves of the tree are indexed by k-bit words sigma.  Their
numerators p_k(sigma) and denominators q_k(sigma) obey the two-term
recursions (with rho = 2 - r and bar denoting bitwise complement)

    p_{k+1}(0,sigma) = p_k(sigma)
    p_{k+1}(1,sigma) = rho q_k(bar) + (r-1) p_k(bar)
    q_{k+1}(0,sigma) = rho q_k(sigma) + r p_k(sigma)
    q_{k+1}(1,sigma) = rho q_k(bar) + r p_k(bar)

starting from p_0 = 1, q_0 = 2.  Interpreting Q_k = log q_k as the
energy of a chain of k binary spins, the Fourier coefficients of p_k
and q_k over the hypercube have a closed product form indexed by a
polymer decomposition of the frequency word, and the induced spin
interaction -Q_k^ is ferromagnetic for r in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .rings import Params
from .words import SpinWord

EXACT_TABLE_CAP = 16
FLOAT_TABLE_CAP = 26
FOURIER_CAP = 24


def _check_cap(k: int, p: Params) -> None:
    cap = FLOAT_TABLE_CAP if p.mode == "float" else EXACT_TABLE_CAP
    if k > cap:
        raise ValueError(f"k={k} exceeds the {p.mode}-mode table cap {cap}")


@dataclass(frozen=True)
class PQTable:
    """Dense numerator/denominator tables over all k-bit words.

    Entries are indexed by the lexicographic word index; in float mode
    they are numpy arrays, otherwise Python lists of exact scalars.
    """

    k: int
    p: Sequence
    q: Sequence

    def pq(self, sigma: SpinWord):
        if sigma.k != self.k:
            raise ValueError("word length does not match table level")
        return self.p[sigma.index], self.q[sigma.index]

    def value(self, sigma: SpinWord):
        pv, qv = self.pq(sigma)
        if isinstance(pv, Fraction) or isinstance(qv, Fraction):
            return Fraction(pv, qv)
        return pv / qv


def pq_tables(k: int, params: Params) -> PQTable:
    """Tables of p_k, q_k over all of (Z/2Z)^k via the two-term recursions."""
    _check_cap(k, params)
    if params.mode == "float":
        p, q = _pq_arrays_float(k, params.r_float)
        return PQTable(k, p, q)
    one = params.one
    r, rho = params.r, params.rho
    p: List = [one]
    q: List = [one + one]
    for _ in range(k):
        pbar = p[::-1]
        qbar = q[::-1]
        upper_p = [rho * qbar[i] + (r - 1) * pbar[i] for i in range(len(p))]
        lower_q = [rho * q[i] + r * p[i] for i in range(len(p))]
        p = p + upper_p
        q = lower_q + lower_q[::-1]
    return PQTable(k, p, q)


def _pq_arrays_float(k: int, r: float) -> Tuple[np.ndarray, np.ndarray]:
    rho = 2.0 - r
    p = np.array([1.0])
    q = np.array([2.0])
    for _ in range(k):
        upper_p = rho * q[::-1] + (r - 1.0) * p[::-1]
        lower_q = rho * q + r * p
        p = np.concatenate([p, upper_p])
        q = np.concatenate([lower_q, lower_q[::-1]])
    return p, q


def iter_pq_rows(k_max: int, r: float) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
    """Yield (k, p_k, q_k) float arrays for k = 0 .. k_max, reusing work."""
    rho = 2.0 - r
    p = np.array([1.0])
    q = np.array([2.0])
    yield 0, p, q
    for k in range(k_max):
        upper_p = rho * q[::-1] + (r - 1.0) * p[::-1]
        lower_q = rho * q + r * p
        p = np.concatenate([p, upper_p])
        q = np.concatenate([lower_q, lower_q[::-1]])
        yield k + 1, p, q


def pc_qc_tables(k: int, params: Params) -> PQTable:
    """Tables of the cumulative polynomials pc_k, qc_k over (Z/2Z)^k.

    These start from pc_1 = (0, 1), qc_1 = (1, 2) and extend by
    appending a bit tau on the right: appending 0 leaves the entry
    unchanged, appending 1 combines the entry with its complement,
    weighted by rho^(k - m) where m is the position of the last 1.
    They tie the full tree to single-level tables through

        p_k(sigma) = pc_{k+1}(sigma, 1),   q_k(sigma) = qc_{k+1}(sigma, 1),

    and the canonical partition function at level n is the plain sum of
    qc_n(sigma)^(-s) over all n-bit words.
    """
    if k < 1:
        raise ValueError("cumulative tables start at k = 1")
    _check_cap(k, params)
    if params.mode == "float":
        pc, qc = _pc_qc_arrays_float(k, params.r_float)
        return PQTable(k, pc, qc)
    one = params.one
    rho = params.rho
    pc: List = [one - one, one]
    qc: List = [one, one + one]
    rmax = [0, 1]
    for kk in range(1, k):
        n = len(pc)
        new_pc: List = [None] * (2 * n)
        new_qc: List = [None] * (2 * n)
        new_rmax = [0] * (2 * n)
        for i in range(n):
            j = n - 1 - i  # complement index
            new_pc[2 * i] = pc[i]
            new_qc[2 * i] = qc[i]
            new_rmax[2 * i] = rmax[i]
            wi = rho ** (kk - rmax[i])
            wj = rho ** (kk - rmax[j])
            new_qc[2 * i + 1] = wi * qc[i] + wj * qc[j]
            new_pc[2 * i + 1] = wi * pc[i] + wj * (qc[j] - pc[j])
            new_rmax[2 * i + 1] = kk + 1
        pc, qc, rmax = new_pc, new_qc, new_rmax
    return PQTable(k, pc, qc)


def _pc_qc_arrays_float(k: int, r: float) -> Tuple[np.ndarray, np.ndarray]:
    rho = 2.0 - r
    pc = np.array([0.0, 1.0])
    qc = np.array([1.0, 2.0])
    rmax = np.array([0, 1])
    for kk in range(1, k):
        rev = slice(None, None, -1)
        wi = rho ** (kk - rmax).astype(float)
        wj = wi[rev]
        qc1 = wi * qc + wj * qc[rev]
        pc1 = wi * pc + wj * (qc[rev] - pc[rev])
        pc = np.stack([pc, pc1], axis=1).ravel()
        qc = np.stack([qc, qc1], axis=1).ravel()
        rmax = np.stack([rmax, np.full_like(rmax, kk + 1)], axis=1).ravel()
    return pc, qc


def fourier_transform(values, k: int | None = None):
    """Hypercube Fourier transform f^(t) = 2^-k sum_sigma f(sigma) (-1)^(sigma.t).

    Fast Walsh butterflies; exact when fed Fractions, vectorized when
    fed a numpy array.  The transform is its own inverse up to the
    2^-k normalization (see :func:`inverse_fourier`).
    """
    n = len(values)
    if k is None:
        k = n.bit_length() - 1
    if n != 1 << k:
        raise ValueError("length must be a power of two")
    if k > FOURIER_CAP:
        raise ValueError(f"k={k} exceeds the transform cap {FOURIER_CAP}")
    out = _walsh(values, n)
    if isinstance(out, np.ndarray):
        return out / float(n)
    return [Fraction(v, n) if isinstance(v, (int, Fraction)) else v / n for v in out]


def inverse_fourier(coeffs, k: int | None = None):
    """Reconstruct f(sigma) = sum_t f^(t) (-1)^(sigma.t) (no normalization)."""
    n = len(coeffs)
    if k is None:
        k = n.bit_length() - 1
    if n != 1 << k:
        raise ValueError("length must be a power of two")
    return _walsh(coeffs, n)


def _walsh(values, n: int):
    if isinstance(values, np.ndarray):
        a = values.astype(values.dtype, copy=True)
        h = 1
        while h < n:
            a = a.reshape(-1, 2 * h)
            x = a[:, :h].copy()
            y = a[:, h:].copy()
            a[:, :h] = x + y
            a[:, h:] = x - y
            h *= 2
        return a.reshape(n)
    a = list(values)
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            for i in range(start, start + h):
                x, y = a[i], a[i + h]
                a[i] = x + y
                a[i + h] = x - y
        h *= 2
    return a


@dataclass(frozen=True)
class Polymer:
    """A frequency-word building block with one or two one-bits.

    An odd polymer has a single one at position ell and support
    {1, ..., ell}; an even polymer has ones at a < b and support
    {a, ..., b}.  The decomposition of a word into polymers with
    pairwise disjoint supports is unique.
    """

    kind: str  # "odd" | "even"
    ends: Tuple[int, ...]

    @property
    def support_size(self) -> int:
        if self.kind == "odd":
            return self.ends[0]
        return self.ends[1] - self.ends[0] + 1

    def support(self) -> Tuple[int, int]:
        if self.kind == "odd":
            return (1, self.ends[0])
        return (self.ends[0], self.ends[1])

    def activity(self, params: Params):
        """Rational weight z(polymer); negative for all r in (0, 2)."""
        r = params.r
        base = (2 - r) / (4 - r)
        if self.kind == "odd":
            return -(base ** self.support_size)
        return -(r / (2 - r)) * base ** self.support_size


def polymer_decompose(t: SpinWord) -> List[Polymer]:
    """Unique decomposition of t into polymers with disjoint supports.

    If |t| is odd the leftmost one-bit forms the odd polymer (its
    support reaches back to position 1); the remaining one-bits are
    paired consecutively left to right into even polymers.
    """
    ones = list(t.ones())
    out: List[Polymer] = []
    if len(ones) % 2 == 1:
        out.append(Polymer("odd", (ones.pop(0),)))
    for a, b in zip(ones[0::2], ones[1::2]):
        out.append(Polymer("even", (a, b)))
    return out


def polymer_recompose(polymers: Sequence[Polymer], k: int) -> SpinWord:
    bits = 0
    for g in polymers:
        for pos in g.ends:
            bits ^= 1 << (k - pos)
    return SpinWord(k, bits)


def hat_pq_closed(t: SpinWord, params: Params):
    """Closed-form Fourier coefficients (p_k^(t), q_k^(t)).

    p_k^(t) = ((4-r)/2)^k * prod of polymer activities; q_k^ carries the
    extra factor (1 + (-1)^|t|), so it vanishes for odd |t|.
    """
    if params.mode == "symbolic":
        raise ValueError("activities are rational in r; use exact or float mode")
    r = params.r
    k = t.k
    if params.mode == "exact":
        pref = Fraction(4 - r, 2) ** k
    else:
        pref = ((4.0 - r) / 2.0) ** k
    prod = params.one
    for g in polymer_decompose(t):
        prod = prod * g.activity(params)
    p_hat = pref * prod
    q_hat = p_hat * (1 + (-1) ** t.weight())
    return p_hat, q_hat


def partial_sum_word(t: SpinWord) -> SpinWord:
    """The automorphism t -> (t_1, t_1+t_2, ..., t_1+...+t_k) mod 2."""
    bits = []
    acc = 0
    for b in t:
        acc ^= b
        bits.append(acc)
    return SpinWord.from_bits(bits)


@dataclass(frozen=True)
class IsingConstants:
    """Constants of the exponential rewriting of q_k^ and its chain form.

    c0, c1, c2 weight the word statistics (length, |psi(t)|, polymer
    count); c2_tilde = c2/4 < 0 is the nearest-neighbour constant of
    the chain form in the spins sigma_i = (-1)^(psi(t)_i), which enters
    the pair coupling with coefficient -c2_tilde and the two boundary
    fields likewise.
    """

    r: float
    c0: float
    c1: float
    c2: float

    @property
    def c2_tilde(self) -> float:
        return self.c2 / 4.0

    @property
    def coupling(self) -> float:
        return -self.c2 / 4.0

    @property
    def bulk_field(self) -> float:
        return -self.c1 / 2.0

    @property
    def edge_field(self) -> float:
        return -self.c2 / 4.0

    def log_prefactor(self, k: int) -> float:
        return self.c0 * k + self.c1 * k / 2.0 + self.c2 * (k + 1) / 4.0


def ising_constants(params: Params) -> IsingConstants:
    r = params.r_float
    if not 0 < r < 2:
        raise ValueError("the exponential form requires r in (0, 2)")
    return IsingConstants(
        r=r,
        c0=math.log((4 - r) / 2),
        c1=math.log((2 - r) / (4 - r)),
        c2=math.log(r / (4 - r)),
    )


def hat_q_ising(t: SpinWord, params: Params) -> float:
    """q_k^(t) through the exponential (spin-chain) rewriting.

    Equals (1+(-1)^|t|) (-1)^n(t) exp(c0 k + c1 |psi(t)| + c2 n(t))
    where psi is the partial-sum automorphism and n(t) = <t, psi(t)>
    counts the polymers of t.
    """
    if t.weight() % 2 == 1:
        return 0.0
    c = ising_constants(params)
    s = partial_sum_word(t)
    n_t = t.inner(s)
    expo = c.c0 * t.k + c.c1 * s.weight() + c.c2 * n_t
    return 2.0 * (-1.0) ** n_t * math.exp(expo)


def hat_q_ising_exact(t: SpinWord, params: Params) -> Fraction:
    """The exponential rewrite of q_k^ as an exact product of rationals.

    Identical to :func:`hat_q_ising` with exp(c_i) replaced by the
    underlying ratios, so the rewrite identity can be checked with zero
    tolerance at rational r:

        2 (-1)^n(t) ((4-r)/2)^k ((2-r)/(4-r))^|psi(t)| (r/(4-r))^n(t).
    """
    if params.mode != "exact":
        raise ValueError("exact rewrite needs exact-rational parameters")
    if t.weight() % 2 == 1:
        return Fraction(0)
    r = params.r
    s = partial_sum_word(t)
    n_t = t.inner(s)
    return (
        2
        * Fraction(-1) ** n_t
        * Fraction(4 - r, 2) ** t.k
        * ((2 - r) / (4 - r)) ** s.weight()
        * (r / (4 - r)) ** n_t
    )


def hat_q_ising_abs(t: SpinWord, params: Params) -> float:
    """|q_k^(t)| via the nearest-neighbour chain form (|t| even).

    The spins are sigma_i = (-1)^(psi(t)_i); the energy is a sum of a
    bulk field, boundary fields on sigma_1 and sigma_k, and a
    nearest-neighbour pair term, all built from c1 and c2.
    """
    if t.weight() % 2 == 1:
        return 0.0
    c = ising_constants(params)
    s = partial_sum_word(t)
    spins = [1.0 - 2.0 * b for b in s]
    k = t.k
    expo = c.log_prefactor(k)
    expo += c.bulk_field * sum(spins)
    if k:
        expo += c.edge_field * (spins[0] + spins[-1])
    expo += c.coupling * sum(spins[i] * spins[i + 1] for i in range(k - 1))
    return 2.0 * math.exp(expo)


def polymer_count(t: SpinWord) -> int:
    """n(t) = <t, psi(t)>; equals the length of the decomposition."""
    return t.inner(partial_sum_word(t))


def interaction_coefficients(k: int, params: Params) -> np.ndarray:
    """Fourier coefficients Q_k^ of the energy Q_k = log q_k (float).

    The induced interaction constants are -Q_k^(t); for r in [0, 1]
    they are all nonnegative away from t = 0 (ferromagnetic chain).
    The t = 0 coefficient carries the additive bulk term
    log 2 + k log((4-r)/2).
    """
    if k > 20:
        raise ValueError("interaction tables capped at k = 20")
    table = pq_tables(k, params.as_float())
    energies = np.log(np.asarray(table.q, dtype=float))
    return fourier_transform(energies, k)


def ferromagnetic_violation(k: int, params: Params) -> float:
    """max over t != 0 of Q_k^(t); ferromagnetic iff <= 0 (up to rounding)."""
    q_hat = interaction_coefficients(k, params)
    return float(np.max(q_hat[1:])) if k > 0 else 0.0
