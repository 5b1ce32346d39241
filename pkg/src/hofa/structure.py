"""Explicit kernels on Z_Ñ and the structured/uniform decompositions they induce.

A kernel is a nonnegative mean-one function on Z_Ñ whose spectrum sits near the
rationals p/Q.  Convolving the zero-padded f_N with it gives the structured part;
everything else is exact bookkeeping around that convolution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arith import FactorSieve, FunctionTable, MultiplicativeSpec, build_sieve, is_prime, tabulate
from .errors import InvalidArgument
from .gowers import default_nstar, dft, gowers_u2_fft, idft

FACTORIAL_CANDIDATES = tuple(math.factorial(k) for k in range(1, 9))


def circ_dist(x, modulus: int):
    """Ñ·||x/Ñ||: distance from x to the nearest multiple of the modulus."""
    r = np.mod(x, modulus)
    return np.minimum(r, modulus - r)


@dataclass(frozen=True)
class KernelParams:
    Ntilde: int
    Q: int
    W: int
    theta: float | None = None

    def __post_init__(self):
        if not is_prime(self.Ntilde):
            raise InvalidArgument("Ntilde must be prime")
        if self.Q < 1 or self.W < 1:
            raise InvalidArgument("Q and W must be positive")
        if self.Ntilde <= 2 * self.W:
            raise InvalidArgument(f"need Ntilde > 2W, got Ntilde={self.Ntilde}, W={self.W}")
        if math.gcd(self.Q, self.Ntilde) != 1:
            raise InvalidArgument("Q must be coprime to Ntilde")


@dataclass(frozen=True)
class Kernel:
    """Kernel values on Z_Ñ with their closed-form Fourier coefficients."""

    Ntilde: int
    Q: int
    W: int
    values: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)

    @property
    def spectrum(self) -> np.ndarray:
        return np.flatnonzero(self.coeffs)

    @property
    def spectrum_size(self) -> int:
        return int(np.count_nonzero(self.coeffs))


def _fejer_values(Nt: int, m: int, x: np.ndarray) -> np.ndarray:
    x = np.mod(x, Nt)
    out = np.full(x.shape, float(m))
    nz = x != 0
    num = np.sin(np.pi * m * x[nz] / Nt) ** 2
    den = np.sin(np.pi * x[nz] / Nt) ** 2
    out[nz] = num / den / m
    return out


def fejer_kernel(Ntilde: int, m: int) -> Kernel:
    """sum_{|xi|<m} (1 - |xi|/m) e(x xi / Ñ), via its closed form."""
    Ntilde, m = int(Ntilde), int(m)
    if m < 1:
        raise InvalidArgument("m must be positive")
    if Ntilde <= 2 * m:
        raise InvalidArgument(f"need Ntilde > 2m, got {Ntilde} <= {2 * m}")
    xi = np.arange(Ntilde)
    d = circ_dist(xi, Ntilde)
    coeffs = np.where(d < m, 1.0 - d / m, 0.0)
    return Kernel(Ntilde, 1, m, _fejer_values(Ntilde, m, xi), coeffs)


def structured_kernel(params: KernelParams) -> Kernel:
    """Fejér kernel of width W composed with x -> Q^{-1} x mod Ñ."""
    Nt, Q, W = params.Ntilde, params.Q, params.W
    qinv = pow(Q, -1, Nt)
    x = np.arange(Nt, dtype=np.int64)
    values = _fejer_values(Nt, W, (qinv * x) % Nt)
    d = circ_dist(Q * x, Nt)
    coeffs = np.where(d < W, 1.0 - d / W, 0.0)
    return Kernel(Nt, Q, W, values, coeffs)


def params_from_QV(Ntilde: int, Q: int, V: int, theta: float) -> KernelParams:
    """Width W = Q·V·⌈θ^{-4}⌉."""
    return KernelParams(int(Ntilde), int(Q), int(Q) * int(V) * math.ceil(theta ** -4), theta)


# ---------------------------------------------------------------- decompositions


@dataclass(frozen=True)
class DecompositionReport:
    spectrum_size: int
    spectrum_contained: bool
    almost_period_deficit: float
    deficit_bound: float
    u2_uniform: float
    u2_total: float
    reconstruction_error: float
    max_abs_structured: float


@dataclass(frozen=True)
class Decomposition:
    fN: np.ndarray = field(repr=False)
    fst: np.ndarray = field(repr=False)
    fun: np.ndarray = field(repr=False)
    kernel: Kernel = field(repr=False)
    report: DecompositionReport
    fer: np.ndarray | None = field(default=None, repr=False)
    kernel2: Kernel | None = field(default=None, repr=False)


def spectrum_containment(kernel: Kernel) -> tuple[bool, float]:
    """Check every xi in the spectrum satisfies |xi/Ñ - p/Q| <= W/(QÑ).

    Writing Q·xi = k·Ñ + r with |r| minimal gives |xi/Ñ - k/Q| = |r|/(QÑ), so the
    test is the integer inequality |r| <= W.  Returns (ok, max |r|/W).
    """
    xi = kernel.spectrum
    if xi.size == 0:
        return True, 0.0
    r = circ_dist(kernel.Q * xi.astype(np.int64), kernel.Ntilde)
    worst = int(r.max())
    return worst <= kernel.W, worst / kernel.W


def _as_signal(table, Ntilde: int) -> np.ndarray:
    if isinstance(table, FunctionTable):
        return table.embed(Ntilde)
    a = np.asarray(table, dtype=complex)
    if a.shape != (Ntilde,):
        raise InvalidArgument(f"signal length {a.size} does not match Ntilde={Ntilde}")
    return a


def convolve_with_kernel(fN: np.ndarray, kernel: Kernel) -> np.ndarray:
    """f_N * kernel as the product of the two transforms."""
    return idft(dft(fN) * dft(kernel.values))


def convolve_with_kernel_direct(fN: np.ndarray, kernel: Kernel) -> np.ndarray:
    """O(Ñ^2) reference for :func:`convolve_with_kernel`."""
    Nt = kernel.Ntilde
    n = np.arange(Nt)
    return np.array([np.mean(fN[(k - n) % Nt] * kernel.values) for k in range(Nt)])


def _report(fN, fst, fun, kernel, recon) -> DecompositionReport:
    Q, Nt = kernel.Q, kernel.Ntilde
    ok, _ = spectrum_containment(kernel)
    deficit = Nt * float(np.max(np.abs(np.roll(fst, -Q) - fst)))
    return DecompositionReport(
        spectrum_size=kernel.spectrum_size,
        spectrum_contained=ok,
        almost_period_deficit=deficit,
        deficit_bound=2 * math.pi * kernel.spectrum_size * kernel.W,
        u2_uniform=gowers_u2_fft(fun),
        u2_total=gowers_u2_fft(fN),
        reconstruction_error=float(np.max(np.abs(recon - fN))),
        max_abs_structured=float(np.max(np.abs(fst))),
    )


def decompose(table, kernel: Kernel) -> Decomposition:
    """f_N = f_st + f_un with f_st = f_N * kernel."""
    fN = _as_signal(table, kernel.Ntilde)
    fst = convolve_with_kernel(fN, kernel)
    fun = fN - fst
    return Decomposition(fN, fst, fun, kernel, _report(fN, fst, fun, kernel, fst + fun))


def three_term_decompose(table, kernel1: Kernel, kernel2: Kernel) -> Decomposition:
    """f_st = f*ψ1, f_er = f*ψ2 - f*ψ1, f_un = f - f*ψ2."""
    if kernel1.Ntilde != kernel2.Ntilde:
        raise InvalidArgument("kernels must share Ntilde")
    fN = _as_signal(table, kernel1.Ntilde)
    c1 = convolve_with_kernel(fN, kernel1)
    c2 = convolve_with_kernel(fN, kernel2)
    fer = c2 - c1
    fun = fN - c2
    rep = _report(fN, c1, fun, kernel1, c1 + fer + fun)
    return Decomposition(fN, c1, fun, kernel1, rep, fer=fer, kernel2=kernel2)


# ---------------------------------------------------------------- parameters


@dataclass(frozen=True)
class QVEstimate:
    Q: int
    V: int
    Ntilde: int
    max_distance: int
    witnesses: tuple = ()  # (label, xi, |hat f_N(xi)|)


def large_coefficients(fN: np.ndarray, theta: float) -> tuple[np.ndarray, np.ndarray]:
    spec = np.abs(dft(fN))
    xi = np.flatnonzero(spec >= theta ** 2)
    return xi, spec[xi]


def estimate_QV(family: Sequence[MultiplicativeSpec], N: int, theta: float,
                Ntilde: int | None = None, sieve: FactorSieve | None = None,
                candidates: Sequence[int] = FACTORIAL_CANDIDATES) -> QVEstimate:
    """Empirical (Q, V) over a finite family.

    Collects xi with |hat f_N(xi)| >= θ², picks the factorial Q minimizing
    max Ñ·||Q xi/Ñ|| (smallest Q on ties) and sets V = ⌈max/Q⌉ + 1.
    """
    if not 0 < theta < 1:
        raise InvalidArgument("theta must lie in (0, 1)")
    if not family:
        raise InvalidArgument("family must be nonempty")
    Nt = default_nstar(N) if Ntilde is None else int(Ntilde)
    sieve = sieve if sieve is not None else build_sieve(max(int(N), 2))
    wit = []
    for spec in family:
        fN = tabulate(spec, N, sieve).embed(Nt)
        xi, mag = large_coefficients(fN, theta)
        wit.extend((spec.label, int(x), float(m)) for x, m in zip(xi, mag))
    if not wit:
        return QVEstimate(1, 1, Nt, 0, ())
    xs = np.array([w[1] for w in wit], dtype=np.int64)
    best_q, best = None, None
    for q in candidates:
        if q % Nt == 0:
            continue
        worst = int(circ_dist((q % Nt) * xs, Nt).max())
        if best is None or worst < best:
            best_q, best = q, worst
    V = -(-best // best_q) + 1
    return QVEstimate(best_q, V, Nt, best, tuple(wit))


@dataclass(frozen=True)
class Certificate:
    hypothesis_holds: bool
    violations: tuple  # xi with a large coefficient but kernel coefficient < 1 - θ⁴
    u2_uniform: float
    theta: float

    @property
    def passes(self) -> bool | None:
        """True/False when the hypothesis holds; None when nothing is asserted."""
        if not self.hypothesis_holds:
            return None
        return self.u2_uniform <= self.theta + 1e-9


def conditional_u2_certificate(decomp: Decomposition, theta: float) -> Certificate:
    """If hat κ(ξ) >= 1-θ⁴ wherever |hat f_N(ξ)| >= θ², then ||f_un||_{U²} <= θ."""
    xi, _ = large_coefficients(decomp.fN, theta)
    kappa = decomp.kernel.coeffs
    bad = tuple(int(x) for x in xi if kappa[x] < 1 - theta ** 4)
    return Certificate(not bad, bad, decomp.report.u2_uniform, theta)


# ---------------------------------------------------------------- energy increment


def required_steps(eps: float) -> int:
    """J = 1 + ⌈2 ε^{-2}⌉ kernel steps."""
    return 1 + math.ceil(2 / eps ** 2)


@dataclass(frozen=True)
class EnergyIncrement:
    energies: np.ndarray  # weighted E_f ||f*ψ_{j+1} - f*ψ_j||²_{L²}
    j0: int
    decompositions: tuple

    @property
    def total(self) -> float:
        return float(self.energies.sum())


def is_nested(k1: Kernel, k2: Kernel) -> bool:
    """Q | Q' and W'/Q' >= W/Q, which forces hat k2 >= hat k1 pointwise."""
    return k2.Q % k1.Q == 0 and k2.W * k1.Q >= k1.W * k2.Q


def energy_increment(tables: Sequence, weights: Sequence[float], chain: Sequence[Kernel]) -> EnergyIncrement:
    """Pick j0 with the smallest weighted energy between consecutive kernels.

    The chain must be nested; then the energies telescope to at most
    sum_f w_f E|f_N|², so the minimum is at most that over J = len(chain) - 1.
    Returns the three-term decompositions at (ψ_{j0}, ψ_{j0+1}).
    """
    if len(chain) < 2:
        raise InvalidArgument("need at least two kernels")
    for k1, k2 in zip(chain, chain[1:]):
        if k1.Ntilde != k2.Ntilde or not is_nested(k1, k2):
            raise InvalidArgument("kernel chain must be nested on one modulus")
    w = np.asarray(weights, dtype=float)
    if w.size != len(tables) or np.any(w < 0) or not np.isclose(w.sum(), 1.0):
        raise InvalidArgument("weights must be a probability vector over the tables")
    Nt = chain[0].Ntilde
    specs = [dft(_as_signal(t, Nt)) for t in tables]
    coeffs = [dft(k.values).real for k in chain]
    energies = np.zeros(len(chain) - 1)
    for j in range(len(chain) - 1):
        diff = coeffs[j + 1] - coeffs[j]
        energies[j] = sum(wi * float(np.sum(np.abs(s * diff) ** 2)) for wi, s in zip(w, specs))
    j0 = int(np.argmin(energies))
    decs = tuple(three_term_decompose(t, chain[j0], chain[j0 + 1]) for t in tables)
    return EnergyIncrement(energies, j0, decs)
