"""Exact arithmetic in Z[τ_d] for imaginary quadratic d.

τ_d = (1+√-d)/2 when d ≡ 3 (mod 4) and √-d otherwise, so an element is a pair
(m, n) standing for m + nτ_d.  All arithmetic uses Python integers and is checked
against the signed 64-bit range, matching the fixed-width contract.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .arith import is_prime
from .errors import ArithmeticOverflow, InvalidArgument

INT64_MAX = (1 << 63) - 1


def _chk(*vals: int) -> None:
    for v in vals:
        if not -INT64_MAX - 1 <= v <= INT64_MAX:
            raise ArithmeticOverflow(f"value {v} leaves the signed 64-bit range")


def _check_d(d: int) -> int:
    d = int(d)
    if d < 1:
        raise InvalidArgument("d must be a positive integer")
    return d


def half_case(d: int) -> bool:
    """True when τ_d = (1+√-d)/2."""
    return d % 4 == 3


def norm_form(d: int, m, n):
    """Q_d(m, n); works on ints and integer arrays."""
    if half_case(d):
        return m * m + m * n + ((d + 1) // 4) * n * n
    return m * m + d * n * n


@dataclass(frozen=True, order=True)
class QuadInt:
    m: int
    n: int
    d: int = 1

    def __post_init__(self):
        _check_d(self.d)
        _chk(self.m, self.n)

    # ring operations
    def _same(self, other: "QuadInt") -> None:
        if other.d != self.d:
            raise InvalidArgument("elements of different rings")

    def __add__(self, other: "QuadInt") -> "QuadInt":
        self._same(other)
        return QuadInt(self.m + other.m, self.n + other.n, self.d)

    def __neg__(self) -> "QuadInt":
        return QuadInt(-self.m, -self.n, self.d)

    def __sub__(self, other: "QuadInt") -> "QuadInt":
        return self + (-other)

    def __mul__(self, other: "QuadInt") -> "QuadInt":
        return multiply(self, other)

    @property
    def is_zero(self) -> bool:
        return self.m == 0 and self.n == 0

    @property
    def is_rational(self) -> bool:
        return self.n == 0

    def norm(self) -> int:
        return norm(self)

    def conj(self) -> "QuadInt":
        return conjugate(self)

    def __str__(self) -> str:
        t = "i" if self.d == 1 else "τ"
        if self.n == 0:
            return str(self.m)
        sign = "+" if self.n > 0 else "-"
        coef = "" if abs(self.n) == 1 else str(abs(self.n))
        return f"{self.m}{sign}{coef}{t}" if self.m else f"{'-' if self.n < 0 else ''}{coef}{t}"


def norm(z: QuadInt) -> int:
    v = norm_form(z.d, z.m, z.n)
    _chk(v)
    return v


def multiply(z: QuadInt, w: QuadInt) -> QuadInt:
    z._same(w)
    d = z.d
    mm, nn = z.m * w.m, z.n * w.n
    cross = z.m * w.n + z.n * w.m
    if half_case(d):
        out = QuadInt(mm - (d + 1) // 4 * nn, cross + nn, d)
    else:
        out = QuadInt(mm - d * nn, cross, d)
    return out


def conjugate(z: QuadInt) -> QuadInt:
    if half_case(z.d):
        # conj(τ) = 1 - τ
        return QuadInt(z.m + z.n, -z.n, z.d)
    return QuadInt(z.m, -z.n, z.d)


def divides(alpha: QuadInt, z: QuadInt) -> tuple[bool, QuadInt | None]:
    """Exact test of alpha | z; returns the quotient z/alpha when it exists."""
    alpha._same(z)
    if alpha.is_zero:
        return (z.is_zero, QuadInt(0, 0, z.d) if z.is_zero else None)
    num = multiply(z, conjugate(alpha))
    nrm = norm(alpha)
    if num.m % nrm or num.n % nrm:
        return False, None
    return True, QuadInt(num.m // nrm, num.n // nrm, z.d)


def units(d: int) -> list[QuadInt]:
    """All solutions of Q_d(m, n) = 1."""
    d = _check_d(d)
    out = [QuadInt(m, n, d) for n in range(-2, 3) for m in range(-2, 3)
           if norm_form(d, m, n) == 1]
    return sorted(out)


def associates(z: QuadInt) -> list[QuadInt]:
    return [multiply(u, z) for u in units(z.d)]


def is_associate(z: QuadInt, w: QuadInt) -> bool:
    return any(a == w for a in associates(z))


def canonical(z: QuadInt) -> QuadInt:
    """Unit multiple with m > 0, or m = 0 and n > 0, that is lexicographically least."""
    if z.is_zero:
        return z
    cands = [a for a in associates(z) if a.m > 0 or (a.m == 0 and a.n > 0)]
    return min(cands, key=lambda a: (a.m, a.n))


# ---------------------------------------------------------------- balls


@dataclass(frozen=True)
class BallEnumeration:
    N: int
    d: int
    points: np.ndarray  # (k, 2) integer array of (m, n) with Q_d <= N²
    R: int
    sandwich_ok: bool

    @property
    def count(self) -> int:
        return len(self.points)


def sandwich_constant(d: int) -> int:
    """An integer R with [-N/R, N/R]² ⊂ B_N ⊂ [-RN, RN]² for every N."""
    d = _check_d(d)
    # inner: Q_d <= (1 + |cross| + c)·max(|m|,|n|)²; outer: |m|,|n| <= 2N always
    c = (d + 1) // 4 if half_case(d) else d
    k = 1 + c + (1 if half_case(d) else 0)
    r = math.isqrt(k)
    return max(2, r if r * r == k else r + 1)


def enumerate_ball(N: int, d: int) -> BallEnumeration:
    """All (m, n) with Q_d(m, n) <= N², plus the sandwich check."""
    N, d = int(N), _check_d(d)
    if N < 1:
        raise InvalidArgument("N must be positive")
    bound = 2 * N + 1
    m = np.arange(-bound, bound + 1, dtype=np.int64)
    M, Nn = np.meshgrid(m, m, indexing="ij")
    q = norm_form(d, M, Nn)
    mask = q <= N * N
    pts = np.stack([M[mask], Nn[mask]], axis=1)
    R = sandwich_constant(d)
    inner = N // R
    outer_ok = bool(np.all(np.abs(pts) <= R * N))
    box = np.arange(-inner, inner + 1, dtype=np.int64)
    bm, bn = np.meshgrid(box, box, indexing="ij")
    inner_ok = bool(np.all(norm_form(d, bm, bn) <= N * N))
    # the enumeration box itself must not clip the ball
    edge_ok = not np.any(mask[[0, -1], :]) and not np.any(mask[:, [0, -1]])
    return BallEnumeration(N, d, pts, R, outer_ok and inner_ok and edge_ok)


def points_up_to_norm(d: int, x: int) -> np.ndarray:
    """All (m, n) with Q_d(m, n) <= x, as an integer array."""
    d, x = _check_d(d), int(x)
    r = math.isqrt(4 * x) + 2
    g = np.arange(-r, r + 1, dtype=np.int64)
    M, Nn = np.meshgrid(g, g, indexing="ij")
    mask = norm_form(d, M, Nn) <= x
    return np.stack([M[mask], Nn[mask]], axis=1)


# ---------------------------------------------------------------- primes


@dataclass(frozen=True)
class PrimeElement:
    z: QuadInt
    canonical: bool
    ramified: bool

    @property
    def norm(self) -> int:
        return norm(self.z)


def prime_elements(d: int, norm_limit: int) -> list[PrimeElement]:
    """Canonical representatives of the non-rational z with prime norm <= limit.

    Conjugates are separate entries unless they are associates (ramified).
    Sorted by (norm, m, n).
    """
    d, norm_limit = _check_d(d), int(norm_limit)
    if norm_limit < 2:
        raise InvalidArgument("norm_limit must be at least 2")
    pts = points_up_to_norm(d, norm_limit)
    seen = set()
    out = []
    for m, n in pts:
        if n == 0:
            continue
        z = QuadInt(int(m), int(n), d)
        nz = norm(z)
        if nz < 2 or not is_prime(nz):
            continue
        c = canonical(z)
        if c in seen:
            continue
        seen.add(c)
        out.append(PrimeElement(c, True, is_associate(c, conjugate(c))))
    out.sort(key=lambda p: (p.norm, p.z.m, p.z.n))
    return out


def zeta_for_form(kappa: int, lam: int, d: int) -> QuadInt:
    """ζ with κm + λn equal to the √-d coefficient of ζ·(m + nτ_d).

    For τ_d = (1+√-d)/2 the doubled element 2(λ - κ + κτ_d) is needed so the
    coefficient stays integral; otherwise ζ = λ + κτ_d.
    """
    d = _check_d(d)
    if half_case(d):
        return QuadInt(2 * (lam - kappa), 2 * kappa, d)
    return QuadInt(lam, kappa, d)


def sqrt_minus_d_coefficient(z: QuadInt) -> float:
    """Coefficient of √-d in z (half-integer when τ_d = (1+√-d)/2)."""
    return z.n / 2 if half_case(z.d) else float(z.n)


def build_P(d: int, zetas: Sequence[QuadInt], norm_limit: int) -> list[PrimeElement]:
    """Unramified canonical prime elements that divide none of the ζ_j."""
    d = _check_d(d)
    for zt in zetas:
        if zt.is_zero or zt.d != d:
            raise InvalidArgument("zetas must be nonzero elements of the same ring")
    out = []
    for p in prime_elements(d, norm_limit):
        if p.ramified:
            continue
        if any(divides(p.z, zt)[0] for zt in zetas):
            continue
        out.append(p)
    return out


def inverse_norm_sum(P: Iterable[PrimeElement]) -> float:
    return math.fsum(1.0 / p.norm for p in P)
