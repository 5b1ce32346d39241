"""Gowers uniformity norms on Z_N and on intervals [N].

Conventions: ``hat a(xi) = E_n a(n) e(-n xi / N)`` and the norms are built by
the recursion ``||a||_{U^{s+1}}^{2^{s+1}} = E_t ||a conj(a_t)||_{U^s}^{2^s}``
with ``a_t(n) = a(n + t)``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import is_prime, next_prime
from .errors import InvalidArgument

# Rows per FFT batch in the shift recursion; bounds memory at ~16 MB per chunk.
_CHUNK_ELEMS = 1 << 20


def thread_cap() -> int:
    """Worker count, capped by the HOFA_THREADS environment variable."""
    cap = os.environ.get("HOFA_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


# ---------------------------------------------------------------- transforms


def _is_pow2(n: int) -> bool:
    return n & (n - 1) == 0


def _fast_len(n: int) -> int:
    """Smallest 2^a 3^b 5^c >= n (lengths the radix FFT handles fastest)."""
    best = 1 << (n - 1).bit_length()
    p5 = 1
    while p5 < best:
        p35 = p5
        while p35 < best:
            m = p35
            while m < n:
                m *= 2
            best = min(best, m)
            p35 *= 3
        p5 *= 5
    return best


@lru_cache(maxsize=64)
def _bluestein_plan(N: int):
    M = _fast_len(2 * N - 1)
    k = np.arange(N, dtype=np.int64)
    # reduce k^2 mod 2N before scaling so the phase stays accurate for large k
    w = np.exp(-1j * np.pi * ((k * k) % (2 * N)) / N)
    b = np.zeros(M, dtype=complex)
    b[:N] = np.conj(w)
    b[M - N + 1:] = np.conj(w[1:])[::-1]
    return M, w, np.fft.fft(b)


def dft(a, axis: int = -1) -> np.ndarray:
    """Normalized DFT ``E_n a(n) e(-n xi/N)`` along ``axis``; any length N.

    Power-of-two lengths go straight to a radix-2 FFT; every other length is
    re-indexed with the chirp identity ``n xi = (n^2 + xi^2 - (xi-n)^2)/2`` into
    a circular convolution of 5-smooth length (Bluestein).
    """
    a = np.moveaxis(np.asarray(a, dtype=complex), axis, -1)
    N = a.shape[-1]
    if N == 0:
        raise InvalidArgument("empty signal")
    if _is_pow2(N):
        out = np.fft.fft(a, axis=-1) / N
    else:
        M, w, fb = _bluestein_plan(N)
        conv = np.fft.ifft(np.fft.fft(a * w, n=M, axis=-1) * fb, axis=-1)
        out = conv[..., :N] * w / N
    return np.moveaxis(out, -1, axis)


def idft(spec, axis: int = -1) -> np.ndarray:
    """Inverse of :func:`dft`: ``a(n) = sum_xi hat a(xi) e(n xi/N)``."""
    spec = np.moveaxis(np.asarray(spec, dtype=complex), axis, -1)
    N = spec.shape[-1]
    out = np.conj(dft(np.conj(spec))) * N
    return np.moveaxis(out, -1, axis)


def dft_direct(a) -> np.ndarray:
    """O(N^2) reference transform of a 1-D signal."""
    a = np.asarray(a, dtype=complex)
    N = a.size
    n = np.arange(N, dtype=np.int64)
    phase = (np.outer(n, n) % N) / N
    return np.exp(-2j * np.pi * phase) @ a / N


def cyclic_convolve(f, g) -> np.ndarray:
    """Normalized cyclic convolution ``E_m f(n-m) g(m)`` via the transform."""
    f, g = np.asarray(f, dtype=complex), np.asarray(g, dtype=complex)
    if f.shape != g.shape:
        raise InvalidArgument("convolution operands must have equal length")
    return idft(dft(f) * dft(g))


def cyclic_convolve_direct(f, g) -> np.ndarray:
    f, g = np.asarray(f, dtype=complex), np.asarray(g, dtype=complex)
    N = f.size
    n = np.arange(N)
    return np.array([np.mean(f[(k - n) % N] * g) for k in range(N)])


# ---------------------------------------------------------------- norms


def _u2_power_rows(rows: np.ndarray) -> np.ndarray:
    """Per-row sum_xi |hat r(xi)|^4.

    Only |hat r| is needed here, so numpy's FFT serves as the transform; the
    module's own :func:`dft` stays the reference elsewhere.
    """
    N = rows.shape[-1]
    spec = np.fft.fft(rows, axis=-1)
    sq = spec.real ** 2 + spec.imag ** 2
    return np.sum(sq * sq, axis=-1) / float(N) ** 4


def _half_shifts(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Shifts 0..N//2 with multiplicities.

    a·conj(a_{-t}) is a conjugated translate of a·conj(a_t), and U^s norms are
    invariant under both, so t and N - t contribute equally.
    """
    ts = np.arange(N // 2 + 1)
    w = np.full(ts.size, 2.0)
    w[0] = 1.0
    if N % 2 == 0:
        w[-1] = 1.0
    return ts, w


def _shift_products(a: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Rows a(n) conj(a(n + t)) for t in ts."""
    N = a.size
    windows = np.lib.stride_tricks.sliding_window_view(np.conj(np.concatenate([a, a])), N)
    return a[None, :] * windows[ts % N]


def _power_fft(a: np.ndarray, s: int, threads: int = 1) -> float:
    """||a||_{U^s}^{2^s} with an FFT U^2 base."""
    N = a.size
    if s == 1:
        return float(abs(a.mean()))
    if s == 2:
        return float(_u2_power_rows(a[None, :])[0])
    ts, w = _half_shifts(N)
    if s == 3:
        chunk = max(1, _CHUNK_ELEMS // max(N, 1))
        starts = list(range(0, ts.size, chunk))

        def work(lo):
            return _u2_power_rows(_shift_products(a, ts[lo:lo + chunk]))

        if threads > 1 and len(starts) > 1:
            with ThreadPoolExecutor(threads) as ex:
                parts = list(ex.map(work, starts))
        else:
            parts = [work(lo) for lo in starts]
        return float(np.dot(np.concatenate(parts), w) / N)
    vals = np.empty(ts.size)
    for i, t in enumerate(ts):
        vals[i] = _power_fft(a * np.conj(np.roll(a, -t)), s - 1, threads)
    return float(np.dot(vals, w) / N)


def _power_direct(a: np.ndarray, s: int) -> float:
    """||a||_{U^s}^{2^s} by the recursion all the way down to U^1."""
    N = a.size
    if s == 1:
        return float(abs(a.mean()))
    if s == 2:
        prods = _shift_products(a, np.arange(N))
        return float(np.sum(np.abs(prods.mean(axis=1)) ** 2) / N)
    vals = [_power_direct(a * np.conj(np.roll(a, -t)), s - 1) for t in range(N)]
    return float(np.sum(vals) / N)


def gowers_power(a, s: int, base: str = "fft") -> float:
    """``||a||_{U^s(Z_N)}^{2^s}`` (for s = 1 this is |E a|)."""
    s = int(s)
    if s < 1:
        raise InvalidArgument("s must be at least 1")
    a = np.asarray(a, dtype=complex)
    if base == "fft":
        return _power_fft(a, s, thread_cap())
    if base == "direct":
        return _power_direct(a, s)
    raise InvalidArgument(f"unknown base {base!r}")


def gowers_norm_cyclic(a, s: int, base: str = "fft") -> float:
    """Gowers U^s norm of ``a`` on Z_N, N = len(a)."""
    p = gowers_power(a, s, base)
    return 0.0 if p <= 0 else p ** (1.0 / 2 ** int(s)) if s > 1 else p


def gowers_u2_fft(a) -> float:
    """U^2 norm as the l^4 norm of the normalized spectrum."""
    a = np.asarray(a, dtype=complex)
    return float(np.sum(np.abs(dft(a)) ** 4) ** 0.25)


def default_nstar(N: int) -> int:
    return next_prime(2 * int(N))


def gowers_norm_interval(values, s: int, nstar: int | None = None) -> float:
    """``||1_[N] a||_{U^s(Z_N*)} / ||1_[N]||_{U^s(Z_N*)}`` with N* > 2N."""
    values = np.asarray(values, dtype=complex)
    N = values.size
    s = int(s)
    if s < 2:
        raise InvalidArgument("interval norms need s >= 2")
    nstar = default_nstar(N) if nstar is None else int(nstar)
    if nstar <= 2 * N:
        raise InvalidArgument(f"Nstar={nstar} must exceed 2N={2 * N}")
    emb = np.zeros(nstar, dtype=complex)
    emb[1:N + 1] = values
    ind = np.zeros(nstar, dtype=complex)
    ind[1:N + 1] = 1.0
    return gowers_norm_cyclic(emb, s) / gowers_norm_cyclic(ind, s)


def embedding_scale_factor(N: int, nstar: int, s: int) -> float:
    """(N*/N)^{(s+1)/2^s}: ratio of U^s norms of a short-supported signal."""
    if nstar < N:
        raise InvalidArgument("need Nstar >= N")
    return (nstar / N) ** ((s + 1) / 2 ** s)


# ---------------------------------------------------------------- bounds


@dataclass(frozen=True)
class ProgressionBound:
    lhs: float
    bound_constant: float
    u2: float

    @property
    def rhs(self) -> float:
        return self.bound_constant * self.u2

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-9


def _l43(spec: np.ndarray) -> float:
    return float(np.sum(np.abs(spec) ** (4.0 / 3.0)) ** 0.75)


def _weighted_bound(weight: np.ndarray, a: np.ndarray) -> ProgressionBound:
    lhs = abs(np.mean(weight * a))
    return ProgressionBound(float(lhs), _l43(dft(weight)), gowers_u2_fft(a))


def progression_u2_bound(a, start: int, step: int, length: int) -> ProgressionBound:
    """|E_{n in [N]} 1_P(n) a(n)| against ||hat 1_P||_{4/3} ||a||_{U^2(Z_N)}.

    P = {start + j*step : 0 <= j < length} must lie in [N]; N = len(a) prime.
    Residue N stands for the integer N.
    """
    a = np.asarray(a, dtype=complex)
    N = a.size
    if not is_prime(N):
        raise InvalidArgument("progression bound needs prime N")
    pts = start + step * np.arange(int(length))
    if length < 1 or pts.min() < 1 or pts.max() > N:
        raise InvalidArgument("progression must be a nonempty subset of [N]")
    w = np.zeros(N)
    w[pts % N] = 1.0
    return _weighted_bound(w, a)


def phase_u2_bound(a, t: float) -> ProgressionBound:
    """|E_{n in [N]} a(n) e(nt)| against ||hat phi_t||_{4/3} ||a||_{U^2(Z_N)}."""
    a = np.asarray(a, dtype=complex)
    N = a.size
    if not is_prime(N):
        raise InvalidArgument("phase bound needs prime N")
    n = np.arange(N)
    n[0] = N
    w = np.exp(2j * np.pi * n * t)
    return _weighted_bound(w, a)


def restriction_report(signals, lo: int, hi: int, s: int) -> np.ndarray:
    """Rows (||a||_{U^s}, ||1_J a||_{U^s}) for J = [lo, hi) over the signals.

    A measurement only: how the restricted norm tracks the full one.
    """
    rows = []
    for a in signals:
        a = np.asarray(a, dtype=complex)
        b = np.zeros_like(a)
        b[lo:hi] = a[lo:hi]
        rows.append((gowers_norm_cyclic(a, s), gowers_norm_cyclic(b, s)))
    return np.array(rows)
