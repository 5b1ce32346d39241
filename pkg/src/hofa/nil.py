"""Heisenberg orbits, torus polynomials and equidistribution diagnostics.

Group law: (x, y, z)·(x', y', z') = (x + x', y + y', z + z' + x y').  Points of the
quotient by the integer lattice are represented in the fundamental domain [0,1)³.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .arith import FactorSieve, MultiplicativeSpec, build_sieve, tabulate_values
from .errors import ArithmeticOverflow, InvalidArgument


@dataclass(frozen=True)
class HeisenbergElement:
    x: float
    y: float
    z: float

    def __mul__(self, other: "HeisenbergElement") -> "HeisenbergElement":
        return heis_mul(self, other)

    def as_tuple(self) -> tuple:
        return (self.x, self.y, self.z)

    @classmethod
    def parse(cls, text: str) -> "HeisenbergElement":
        try:
            vals = [float(v) for v in text.split(",")]
        except ValueError as exc:
            raise InvalidArgument(f"bad group element {text!r}") from exc
        if len(vals) != 3:
            raise InvalidArgument("group element needs three coordinates")
        return cls(*vals)


IDENTITY = HeisenbergElement(0.0, 0.0, 0.0)


def heis_mul(g: HeisenbergElement, h: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(g.x + h.x, g.y + h.y, g.z + h.z + g.x * h.y)


def heis_inv(g: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(-g.x, -g.y, -g.z + g.x * g.y)


def _split(w: float) -> tuple[int, float]:
    """(k, r) with w + k = r in [0, 1); a tiny negative w rounds r up to 1, so fold that back."""
    k = -math.floor(w)
    r = w + k
    if r >= 1.0:
        k, r = k - 1, r - 1.0
    return k, r


def heis_reduce(g: HeisenbergElement) -> tuple[tuple[int, int, int], HeisenbergElement]:
    """(γ, g·γ) with γ = (a, b, c) integral and g·γ in [0,1)³."""
    a, x = _split(g.x)
    b, y = _split(g.y)
    c, z = _split(g.z + g.x * b)
    return (a, b, c), HeisenbergElement(x, y, z)


# ---------------------------------------------------------------- exact orbits


def _dyadic_scale(vals: Sequence[float]) -> int:
    return max(Fraction(v).denominator.bit_length() - 1 for v in vals)


def _exact(a: HeisenbergElement) -> tuple[int, int, int, int]:
    """Integers (X, Y, Z, K) with x = X/2^K, y = Y/2^K, z = Z/4^K exactly."""
    fx, fy, fz = (Fraction(v) for v in a.as_tuple())
    kz = fz.denominator.bit_length() - 1
    K = max(_dyadic_scale([a.x, a.y]), (kz + 1) // 2)
    D = 1 << K
    return int(fx * D), int(fy * D), int(fz * D * D), K


def _reduce_int(X: int, Y: int, Z: int, D: int) -> tuple[int, int, int]:
    b = -(Y // D)
    a = -(X // D)
    Z = Z + X * b * D
    c = -(Z // (D * D))
    return X + a * D, Y + b * D, Z + c * D * D


def orbit(a: HeisenbergElement, N: int, method: str = "iterated") -> np.ndarray:
    """Reduced points of a^n·Γ for n = 1..N as an (N, 3) array.

    Coordinates are carried as exact dyadic integers (floats are dyadic
    rationals), so neither route drifts; ``"closed"`` uses
    a^n = (n x, n y, C(n,2) x y + n z).
    """
    N = int(N)
    if N < 1:
        raise InvalidArgument("N must be positive")
    X, Y, Z, K = _exact(a)
    D = 1 << K
    out = np.empty((N, 3))
    if method == "iterated":
        px, py, pz = 0, 0, 0
        for n in range(N):
            px, py, pz = _reduce_int(X + px, Y + py, Z + pz + X * py, D)
            out[n] = (px / D, py / D, pz / (D * D))
    elif method == "closed":
        XY = X * Y
        for n in range(1, N + 1):
            px, py, pz = _reduce_int(n * X, n * Y, n * (n - 1) // 2 * XY + n * Z, D)
            out[n - 1] = (px / D, py / D, pz / (D * D))
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    return out


# ---------------------------------------------------------------- torus polynomials


def _dist(x) -> np.ndarray:
    r = np.mod(x, 1.0)
    return np.minimum(r, 1.0 - r)


def _binom(b: int, j: int) -> int:
    """Generalized binomial coefficient C(b, j) for any integer b."""
    if b >= 0:
        return math.comb(b, j)
    return (-1) ** j * math.comb(j - b - 1, j)


@dataclass(frozen=True)
class TorusPoly:
    """φ(n) = Σ_j α_j C(n, j) on T^m; ``coeffs[j]`` is α_j (reduced mod 1)."""

    coeffs: np.ndarray = field(repr=True)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if c.ndim != 2:
            raise InvalidArgument("coefficients must form a (d+1, m) array")
        object.__setattr__(self, "coeffs", np.mod(c, 1.0))

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    def __call__(self, n: int) -> np.ndarray:
        n = int(n)
        w = np.array([_binom(n, j) for j in range(self.degree + 1)], dtype=float)
        return np.mod(w @ self.coeffs, 1.0)

    def to_monomial(self) -> np.ndarray:
        """Real coefficients β_k with φ(n) ≡ Σ β_k n^k (mod 1) on the integers."""
        d = self.degree
        out = np.zeros_like(self.coeffs)
        for j in range(d + 1):
            # C(n, j) = Σ_k s(j, k) n^k / j! with signed Stirling numbers
            for k, s in enumerate(_stirling1_row(j)):
                out[k] += self.coeffs[j] * s / math.factorial(j)
        return out

    @classmethod
    def from_monomial(cls, beta) -> "TorusPoly":
        beta = np.atleast_2d(np.asarray(beta, dtype=float))
        d = beta.shape[0] - 1
        alpha = np.zeros_like(beta)
        for k in range(d + 1):
            # n^k = Σ_j S(k, j) j! C(n, j)
            for j in range(k + 1):
                alpha[j] += beta[k] * _stirling2(k, j) * math.factorial(j)
        return cls(alpha)


def _stirling1_row(j: int) -> list[int]:
    """Signed Stirling numbers s(j, k), k = 0..j: n(n-1)...(n-j+1) = Σ s(j,k) n^k."""
    row = [1]
    for i in range(j):
        new = [0] * (len(row) + 1)
        for k, v in enumerate(row):
            new[k + 1] += v
            new[k] -= i * v
        row = new
    return row


def _stirling2(k: int, j: int) -> int:
    return sum((-1) ** i * math.comb(j, i) * (j - i) ** k for i in range(j + 1)) // math.factorial(j)


def smoothness_norm(poly: TorusPoly, N: int) -> float:
    """max_{1<=j<=d} N^j ||α_j||, with ||u|| summed over coordinates."""
    if poly.degree < 1:
        return 0.0
    return max(float(N) ** j * float(np.sum(_dist(poly.coeffs[j]))) for j in range(1, poly.degree + 1))


def poly_shift(poly: TorusPoly, b: int) -> TorusPoly:
    """Binomial coefficients of n -> φ(n + b): β_i = Σ_j C(b, j) α_{i+j}."""
    b = int(b)
    d = poly.degree
    beta = np.zeros_like(poly.coeffs)
    for i in range(d + 1):
        for j in range(d + 1 - i):
            cb = _binom(b, j)
            if abs(cb) >= 1 << 63:
                raise ArithmeticOverflow("binomial coefficient beyond 64 bits")
            beta[i] += cb * poly.coeffs[i + j]
    return TorusPoly(beta)


def shift_bound(b: int, N: int) -> float:
    """((N+1)/N)^{|b|}: the growth factor of the smoothness norm under a shift by b >= 0."""
    return ((N + 1) / N) ** abs(int(b))


def shift_bound_negative(b: int, N: int) -> float:
    """(N/(N-1))^{|b|}: the factor that the generalized binomials give for b < 0."""
    return (N / (N - 1)) ** abs(int(b))


# ---------------------------------------------------------------- diagnostics


def horizontal_character(k: Sequence[int]) -> Callable[[np.ndarray], np.ndarray]:
    """u -> e(k·u) on the first len(k) coordinates."""
    k = np.asarray(k, dtype=float)

    def phi(points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.exp(2j * np.pi * (pts[:, :k.size] @ k))

    phi.frequency = tuple(int(v) for v in k)
    return phi


def default_characters(dims: int, max_l1: int = 5) -> list:
    """Nonzero k in Z^dims with Σ|k_i| <= max_l1, one of each ±k pair."""
    out = []
    for k in np.ndindex(*([2 * max_l1 + 1] * dims)):
        v = tuple(i - max_l1 for i in k)
        if 0 < sum(abs(t) for t in v) <= max_l1:
            first = next(t for t in v if t != 0)
            if first > 0:
                out.append(horizontal_character(v))
    return out


@dataclass(frozen=True)
class DiagnosticResult:
    value: float
    frequency: tuple | None
    step: int
    start: int
    length: int


def equidistribution_diagnostic(points: np.ndarray, test_functions: Sequence[Callable] | None = None,
                                budget: int = 10, dims: int | None = None) -> DiagnosticResult:
    """max |E_{n in [N]} 1_P(n) Φ(x_n)| over sampled progressions and test functions.

    Progressions have step q <= budget, start in [1, q], and are initial
    segments of their residue class of length >= N/(4·budget); any segment is
    a difference of two such prefixes, so the sup over all long segments is at
    most twice this value.  ``points[n-1]`` is x_n.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    N = pts.shape[0]
    if test_functions is None:
        dims = dims if dims is not None else min(pts.shape[1], 2)
        test_functions = default_characters(dims)
    L = max(1, math.ceil(N / (4 * budget)))
    best = DiagnosticResult(0.0, None, 1, 1, 0)
    for phi in test_functions:
        v = np.asarray(phi(pts), dtype=complex)
        for q in range(1, budget + 1):
            for start in range(1, q + 1):
                cs = np.abs(np.cumsum(v[start - 1::q]))
                if cs.size < L:
                    continue
                tail = cs[L - 1:]
                i = int(np.argmax(tail))
                val = float(tail[i]) / N
                if val > best.value:
                    best = DiagnosticResult(val, getattr(phi, "frequency", None), q, start, i + L)
    return best


def daboussi_check(a: HeisenbergElement, test_function: Callable | None,
                   family: Sequence[MultiplicativeSpec], N: int,
                   sieve: FactorSieve | None = None) -> tuple[float, dict]:
    """max over the family of |E_{n in [N]} f(n) Φ(a^n Γ)|; Φ defaults to e(u1 + u2)."""
    if not family:
        raise InvalidArgument("family must be nonempty")
    phi = test_function if test_function is not None else horizontal_character((1, 1))
    pts = orbit(a, N, "closed")
    vals = np.asarray(phi(pts), dtype=complex)
    sieve = sieve if sieve is not None else build_sieve(max(int(N), 2))
    out = {}
    for f in family:
        fv = tabulate_values(f, N, sieve)[1:]
        out[f.label] = float(abs(np.mean(fv * vals)))
    return max(out.values()), out
