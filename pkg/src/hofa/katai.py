"""Kátai-type orthogonality sums over Z and over Z[τ_d].

These are measurement instruments: the criteria they feed have non-effective
constants, so nothing here decides orthogonality.  The sums themselves are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .arith import FactorSieve, MultiplicativeSpec, build_sieve, tabulate_values
from .errors import InsufficientRange, InvalidArgument
from .quadfield import PrimeElement, half_case, norm_form, points_up_to_norm


@dataclass(frozen=True)
class PairCorrelationReport:
    K: int
    N: int
    entries: dict = field(repr=False)  # (p, q) -> |E_{n <= N/q} a(pn) conj(a(qn))|

    @property
    def max_entry(self) -> float:
        return max(self.entries.values())


def _small_primes(K: int) -> list[int]:
    return [p for p in range(2, K) if all(p % q for q in range(2, math.isqrt(p) + 1))]


def pair_correlations(a, K: int) -> PairCorrelationReport:
    """All prime pairs p < q < K; ``a[n-1]`` holds a(n)."""
    a = np.asarray(a, dtype=complex)
    N, K = a.size, int(K)
    if K < 3:
        raise InvalidArgument("K must be at least 3")
    if N < K * K:
        raise InsufficientRange(f"need N >= K^2 = {K * K}, got N={N}")
    ps = _small_primes(K)
    entries = {}
    for i, p in enumerate(ps):
        for q in ps[i + 1:]:
            n = np.arange(1, N // q + 1)
            entries[(p, q)] = float(abs(np.mean(a[p * n - 1] * np.conj(a[q * n - 1]))))
    return PairCorrelationReport(K, N, entries)


def mult_correlation_sup(a, family: Sequence[MultiplicativeSpec],
                         sieve: FactorSieve | None = None) -> tuple[float, dict]:
    """max over the family of |E_{n in [N]} f(n) a(n)|, with per-function values."""
    if not family:
        raise InvalidArgument("family must be nonempty")
    a = np.asarray(a, dtype=complex)
    N = a.size
    sieve = sieve if sieve is not None else build_sieve(max(N, 2))
    vals = {}
    for f in family:
        fv = tabulate_values(f, N, sieve)[1:]
        vals[f.label] = float(abs(np.mean(fv * a)))
    return max(vals.values()), vals


# ---------------------------------------------------------------- Z[τ_d]


def _times(alpha_m: int, alpha_n: int, d: int, M: np.ndarray, Nn: np.ndarray):
    """Coordinates of alpha·(M + Nn τ_d) for integer arrays."""
    mm, nn = alpha_m * M, alpha_n * Nn
    cross = alpha_m * Nn + alpha_n * M
    if half_case(d):
        return mm - (d + 1) // 4 * nn, cross + nn
    return mm - d * nn, cross


def divisible_mask(alpha: PrimeElement, d: int, M: np.ndarray, Nn: np.ndarray) -> np.ndarray:
    """alpha | (M + Nn τ_d), tested as (z·conj(alpha)) ≡ 0 mod N(alpha)."""
    z = alpha.z
    cm, cn = (z.m + z.n, -z.n) if half_case(d) else (z.m, -z.n)
    pm, pn = _times(cm, cn, d, M, Nn)
    nr = alpha.norm
    return (pm % nr == 0) & (pn % nr == 0)


@dataclass(frozen=True)
class TKStats:
    A: float
    mean_deviation: float
    count: int
    omega: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)


def tk_statistics(d: int, P: Sequence[PrimeElement], x: int) -> TKStats:
    """A = Σ 1/N(α) and the mean of |ω(z) - A| over nonzero z with N(z) <= x."""
    if not P:
        raise InvalidArgument("P must be nonempty")
    if x < 1:
        raise InvalidArgument("x must be at least 1")
    pts = points_up_to_norm(d, x)
    pts = pts[(pts[:, 0] != 0) | (pts[:, 1] != 0)]
    M, Nn = pts[:, 0], pts[:, 1]
    omega = np.zeros(len(pts), dtype=np.int64)
    for alpha in P:
        omega += divisible_mask(alpha, d, M, Nn)
    A = math.fsum(1.0 / a.norm for a in P)
    dev = float(np.mean(np.abs(omega - A)))
    return TKStats(A, dev, len(pts), omega, pts)


@dataclass(frozen=True)
class KataiZdSums:
    S: complex
    C: float
    A: float
    x: int
    count: int

    def bound_terms(self) -> float:
        """1/A + 1/A² + C/(A² x): the explicit part of the estimate for |S/x|²."""
        A = self.A
        return 1 / A + 1 / A ** 2 + self.C / (A ** 2 * self.x)


HFunc = Callable[[np.ndarray, np.ndarray], np.ndarray]


def katai_zd_sums(g: MultiplicativeSpec, r: int, h: HFunc, P: Sequence[PrimeElement],
                  x: int, d: int, pair: str = "h",
                  sieve: FactorSieve | None = None) -> KataiZdSums:
    """S(x) = Σ f(z) h(z) and the off-diagonal pair sum C(x).

    f(z) = g(N(z)^r).  The pair sums use h(αz)·conj(h(βz)) by default, which is
    what the off-diagonal term of the estimate produces; ``pair="f"`` uses
    f(αz)·conj(f(βz)) instead and ``pair="fh"`` the product f·h.
    """
    if pair not in ("h", "f", "fh"):
        raise InvalidArgument("pair must be 'h', 'f' or 'fh'")
    if not P:
        raise InvalidArgument("P must be nonempty")
    x = int(x)
    sieve = sieve if sieve is not None else build_sieve(max(x, 2))
    gtab = tabulate_values(g, x, sieve, power=r)
    pts = points_up_to_norm(d, x)
    pts = pts[(pts[:, 0] != 0) | (pts[:, 1] != 0)]
    M, Nn = pts[:, 0], pts[:, 1]
    nz = norm_form(d, M, Nn)
    S = complex(np.sum(gtab[nz] * h(M, Nn)))

    def pair_val(am, an):
        if pair == "h":
            return h(am, an)
        fv = gtab[norm_form(d, am, an)]
        return fv if pair == "f" else fv * h(am, an)

    C = 0.0
    for i, al in enumerate(P):
        for j, be in enumerate(P):
            if i == j:
                continue
            lim = min(x // al.norm, x // be.norm)
            sel = nz <= lim
            zm, zn = M[sel], Nn[sel]
            va = pair_val(*_times(al.z.m, al.z.n, d, zm, zn))
            vb = pair_val(*_times(be.z.m, be.z.n, d, zm, zn))
            C += float(abs(np.sum(va * np.conj(vb))))
    A = math.fsum(1.0 / a.norm for a in P)
    return KataiZdSums(S, C, A, x, len(pts))


def constant_h(M: np.ndarray, Nn: np.ndarray) -> np.ndarray:
    return np.ones(M.shape, dtype=complex)


def katai_battery(signals: dict, family: Sequence[MultiplicativeSpec], K: int = 20,
                  threshold: float = 0.01, sup_bound: float = 0.2) -> list[dict]:
    """Empirical check of the criterion's implication over named signals.

    Each row records maxEntry, the correlation sup and whether the row is a
    counterexample to "maxEntry < threshold implies sup < sup_bound".
    """
    rows = []
    sieve = None
    for name, a in signals.items():
        a = np.asarray(a, dtype=complex)
        if sieve is None or sieve.limit < a.size:
            sieve = build_sieve(max(a.size, 2))
        rep = pair_correlations(a, K)
        sup, _ = mult_correlation_sup(a, family, sieve)
        rows.append({"signal": name, "maxEntry": rep.max_entry, "sup": sup,
                     "finding": bool(rep.max_entry < threshold and sup >= sup_bound)})
    return rows
