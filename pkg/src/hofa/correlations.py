"""Chowla-type averages over binary quadratic forms and linear-forms averages on Z_Ñ."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arith import FactorSieve, FunctionTable, MultiplicativeSpec, build_sieve, evaluate, is_prime, tabulate_values
from .errors import ArithmeticOverflow, InvalidArgument
from .gowers import gowers_norm_cyclic
from .quadfield import norm_form


@dataclass(frozen=True)
class LinearFormSet:
    """Forms L_j(m, n) = κ_j m + λ_j n."""

    forms: tuple
    independence: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        forms = tuple((int(k), int(l)) for k, l in self.forms)
        object.__setattr__(self, "forms", forms)
        k = np.array([f[0] for f in forms], dtype=np.int64)
        l = np.array([f[1] for f in forms], dtype=np.int64)
        object.__setattr__(self, "independence", np.outer(k, l) - np.outer(l, k))

    def independent(self, i: int, j: int) -> bool:
        return bool(self.independence[i, j] != 0)

    @classmethod
    def parse(cls, text: str) -> "LinearFormSet":
        """``"1,0;1,1"`` -> forms m and m + n."""
        text = text.strip()
        if not text:
            return cls(())
        try:
            forms = [tuple(int(v) for v in part.split(",")) for part in text.split(";")]
        except ValueError as exc:
            raise InvalidArgument(f"bad form list {text!r}") from exc
        if any(len(f) != 2 for f in forms):
            raise InvalidArgument("each form needs two coefficients")
        return cls(tuple(forms))

    def __len__(self) -> int:
        return len(self.forms)


def _check_matrix(matrix) -> np.ndarray:
    A = np.asarray(matrix, dtype=np.int64).reshape(2, 2)
    if abs(int(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])) != 1:
        raise InvalidArgument("change of variables must be unimodular")
    return A


def region_points(region: str, N: int, d: int, matrix, rect=None) -> tuple[np.ndarray, np.ndarray]:
    """Lattice points (m, n) of the averaging region."""
    A = _check_matrix(matrix)
    if region == "square":
        g = np.arange(1, N + 1, dtype=np.int64)
        M, Nn = np.meshgrid(g, g, indexing="ij")
        return M.ravel(), Nn.ravel()
    if region == "rectangle":
        if rect is None:
            raise InvalidArgument("rectangle region needs (m0, m1, n0, n1)")
        m0, m1, n0, n1 = (int(v) for v in rect)
        M, Nn = np.meshgrid(np.arange(m0, m1 + 1), np.arange(n0, n1 + 1), indexing="ij")
        return M.ravel().astype(np.int64), Nn.ravel().astype(np.int64)
    if region == "ball":
        # Q(m,n) = Q_d(A(m,n)) <= N², and A^{-1} has entries of size |A|, so
        # |m|,|n| <= 2N·(|A|_max·2) bounds the ball generously
        r = 4 * N * int(np.abs(A).max()) + 1
        g = np.arange(-r, r + 1, dtype=np.int64)
        M, Nn = np.meshgrid(g, g, indexing="ij")
        u, v = A[0, 0] * M + A[0, 1] * Nn, A[1, 0] * M + A[1, 1] * Nn
        mask = norm_form(d, u, v) <= N * N
        return M[mask], Nn[mask]
    raise InvalidArgument(f"unknown region {region!r}")


@dataclass(frozen=True)
class ChowlaResult:
    value: complex
    count: int


def chowla_average(f: MultiplicativeSpec, d: int, matrix, r: int, forms: LinearFormSet,
                   N: int, region: str = "square", rect=None,
                   sieve: FactorSieve | None = None) -> ChowlaResult:
    """Average of f(Q(m,n)^r)·∏ f(L_j(m,n)) over the region, f evenly extended.

    Q(m,n) = Q_d(matrix·(m,n)).  f(Q^r) is read from a table of n -> f(n^r), so
    the power itself is never formed; inputs whose power would exceed 127 bits
    are still rejected.
    """
    r = int(r)
    if r < 0:
        raise InvalidArgument("r must be nonnegative")
    A = _check_matrix(matrix)
    M, Nn = region_points(region, int(N), d, A, rect)
    if M.size == 0:
        raise InvalidArgument("empty region")
    u, v = A[0, 0] * M + A[0, 1] * Nn, A[1, 0] * M + A[1, 1] * Nn
    q = norm_form(d, u, v)
    qmax = int(q.max())
    if r > 0 and qmax > 1 and r * math.log2(qmax) >= 127:
        raise ArithmeticOverflow("Q(m,n)^r exceeds 127 bits")
    lin = [np.abs(k * M + l * Nn) for k, l in forms.forms]
    top = max([qmax] + [int(x.max()) for x in lin] + [2])
    sieve = sieve if sieve is not None else build_sieve(top)
    qtab = tabulate_values(f, qmax, sieve, power=r) if r > 0 else None
    ftab = tabulate_values(f, top, sieve) if lin else None
    if r == 0:
        prod = np.ones(M.size, dtype=complex)  # Q^0 = 1 and f(1) = 1
    else:
        prod = qtab[q].copy()
    for x in lin:
        prod *= ftab[x]  # ftab[0] = 0 is the even extension at 0
    return ChowlaResult(complex(np.sum(prod) / M.size), int(M.size))


def chowla_average_reference(f: MultiplicativeSpec, d: int, matrix, r: int,
                             forms: LinearFormSet, N: int, region: str = "square",
                             rect=None) -> complex:
    """Point-by-point evaluation of :func:`chowla_average` (slow oracle)."""
    A = _check_matrix(matrix)
    M, Nn = region_points(region, int(N), d, A, rect)
    pts = list(zip(M.tolist(), Nn.tolist()))
    big = 2
    for m, n in pts:
        u, v = int(A[0, 0]) * m + int(A[0, 1]) * n, int(A[1, 0]) * m + int(A[1, 1]) * n
        big = max(big, norm_form(d, u, v), *[abs(k * m + l * n) for k, l in forms.forms])
    sieve = build_sieve(big)
    total = 0j
    for m, n in pts:
        u, v = int(A[0, 0]) * m + int(A[0, 1]) * n, int(A[1, 0]) * m + int(A[1, 1]) * n
        q = norm_form(d, u, v)
        if r == 0:
            val = 1 + 0j
        elif q == 0:
            val = 0j
        else:
            val = 1 + 0j
            for p, k in sieve.factor(q).items():
                val *= f.prime_power(p, k * r) if f.kind not in ("archimedean", "dirichlet") \
                    else evaluate(f, p, sieve) ** (k * r)
        for k, l in forms.forms:
            val *= evaluate(f, k * m + l * n, sieve)
        total += val
    return total / len(pts)


# ---------------------------------------------------------------- Z_Ñ averages


def _signals(tables, Ntilde: int) -> list[np.ndarray]:
    out = []
    for t in tables:
        if isinstance(t, FunctionTable):
            out.append(t.embed(Ntilde))
        else:
            a = np.asarray(t, dtype=complex)
            if a.shape != (Ntilde,):
                raise InvalidArgument("signal length must equal Ntilde")
            out.append(a)
    return out


def linear_forms_average(tables: Sequence, shifts: Sequence[int], N: int, Ntilde: int) -> complex:
    """E_{m,n in Z_Ñ} 1_[N](n) ∏_j a_j(m + ℓ_j n), evaluated exactly in O(Ñ·N·s)."""
    shifts = [int(s) for s in shifts]
    if len(shifts) != len(tables) or not shifts:
        raise InvalidArgument("need one shift per table")
    ell = sum(abs(s) for s in shifts)
    if not is_prime(Ntilde) or Ntilde <= 2 * max(ell, 1) * N:
        raise InvalidArgument(f"Ntilde must be a prime > 2·ℓ·N = {2 * max(ell, 1) * N}")
    sig = [np.concatenate([a, a]) for a in _signals(tables, Ntilde)]
    rows = np.empty(N, dtype=complex)
    for n in range(1, N + 1):
        prod = np.ones(Ntilde, dtype=complex)
        for a2, l in zip(sig, shifts):
            off = (l * n) % Ntilde
            prod *= a2[off:off + Ntilde]
        rows[n - 1] = prod.sum()
    return complex(rows.sum() / Ntilde ** 2)


def two_phase_closed_form(xi1: int, xi2: int, l1: int, l2: int, N: int, Ntilde: int) -> complex:
    """linear_forms_average for a_j(m) = e(m ξ_j / Ñ), j = 1, 2, in closed form."""
    if (xi1 + xi2) % Ntilde:
        return 0j
    k = (l1 * xi1 + l2 * xi2) % Ntilde
    if k == 0:
        return N / Ntilde
    w = np.exp(2j * np.pi * k / Ntilde)
    return complex(w * (1 - w ** N) / (1 - w) / Ntilde)


@dataclass(frozen=True)
class UniformityReport:
    lhs: float
    min_norm: float
    implied_c: float | None
    Ntilde: int
    s: int

    @property
    def rhs(self) -> float | None:
        if self.implied_c is None:
            return None
        return self.implied_c * math.sqrt(self.min_norm) + 2 / self.Ntilde


def uniformity_bound_report(tables: Sequence, shifts: Sequence[int], N: int, Ntilde: int,
                            s: int | None = None) -> UniformityReport:
    """lhs, min_j ||a_j||_{U^{s-1}} and the constant the bound would need."""
    s = len(tables) if s is None else int(s)
    if s < 2:
        raise InvalidArgument("s must be at least 2")
    lhs = abs(linear_forms_average(tables, shifts, N, Ntilde))
    norms = {}
    for a in _signals(tables, Ntilde):
        key = a.tobytes()
        if key not in norms:
            norms[key] = gowers_norm_cyclic(a, s - 1)
    mn = min(norms.values())
    implied = None if mn < 1e-12 else (lhs - 2 / Ntilde) / math.sqrt(mn)
    return UniformityReport(lhs, mn, implied, int(Ntilde), s)


def quad_phase_correlation(fun, alpha: float, N: int) -> float:
    """|E_{n in [N]} fun(n) e(n² α)|, fun given on Z_Ñ."""
    fun = np.asarray(fun, dtype=complex)
    if N >= fun.size:
        raise InvalidArgument("N must be smaller than the modulus")
    n = np.arange(1, N + 1, dtype=np.int64)
    phase = np.mod((n * n) * float(alpha), 1.0)
    return float(abs(np.mean(fun[n] * np.exp(2j * np.pi * phase))))


def quad_phase_scan(fun, N: int, alphas: Sequence[float]) -> tuple[float, float]:
    """(max value, argmax α) over a grid of α."""
    vals = [quad_phase_correlation(fun, a, N) for a in alphas]
    i = int(np.argmax(vals))
    return vals[i], float(alphas[i])
