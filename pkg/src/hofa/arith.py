"""Sieve-backed bounded multiplicative functions.

A :class:`MultiplicativeSpec` describes a function by its values on prime powers;
:func:`tabulate` turns it into a :class:`FunctionTable` on ``[N]`` using a smallest
prime factor sieve.  Everything here is pure and immutable after construction.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyDomainError, InvalidArgument, OutOfRange

KINDS = ("liouville", "moebius", "principal", "dirichlet", "archimedean",
         "prime_table", "sum_two_squares")

# Deterministic Miller-Rabin witnesses for all n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    n = int(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    m = max(int(n) + 1, 2)
    while not is_prime(m):
        m += 1
    return m


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization, for small moduli and tests."""
    n = abs(int(n))
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------- sieve


@dataclass(frozen=True)
class FactorSieve:
    limit: int
    spf: np.ndarray = field(repr=False)

    def primes(self, upto: int | None = None) -> np.ndarray:
        upto = self.limit if upto is None else min(int(upto), self.limit)
        idx = np.arange(2, upto + 1)
        return idx[self.spf[2:upto + 1] == idx]

    def factor(self, n: int) -> dict[int, int]:
        n = abs(int(n))
        if n > self.limit:
            raise OutOfRange(f"|n|={n} exceeds sieve limit {self.limit}")
        out: dict[int, int] = {}
        while n > 1:
            p = int(self.spf[n])
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out[p] = k
        return out


def build_sieve(limit: int) -> FactorSieve:
    """Smallest-prime-factor table for ``2..limit``."""
    limit = int(limit)
    if limit < 2:
        raise InvalidArgument("sieve limit must be at least 2")
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            view = spf[p * p::p]
            view[view == 0] = p
    idx = np.arange(limit + 1, dtype=np.int64)
    unset = spf == 0
    spf[unset] = idx[unset]
    spf.setflags(write=False)
    return FactorSieve(limit, spf)


# ---------------------------------------------------------------- characters


def _primitive_root(p: int) -> int:
    """Smallest primitive root mod p**2 (hence mod every p**k), p odd."""
    phi = p - 1
    qs = list(factorize(phi))
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in qs):
            if pow(g, p - 1, p * p) != 1:
                return g
            return g + p
    raise AssertionError("unreachable")


def _component_logs(pk: int, p: int) -> tuple[int, np.ndarray]:
    """Order of (Z/pk)^* and the discrete log table (-1 for non-units)."""
    logs = np.full(pk, -1, dtype=np.int64)
    if pk == 2:
        logs[1] = 0
        return 1, logs
    if pk == 4:
        logs[1], logs[3] = 0, 1
        return 2, logs
    order = pk // p * (p - 1)
    g = _primitive_root(p)
    x = 1
    for e in range(order):
        logs[x] = e
        x = x * g % pk
    return order, logs


def character_table(q: int, index: int) -> np.ndarray:
    """Values of the Dirichlet character mod ``q`` with the given index.

    The unit group is split by CRT into cyclic components (modulus 8 divides q
    is rejected).  ``index`` is read in mixed radix, lowest component first, as
    exponents on fixed generators.
    """
    q, index = int(q), int(index)
    if q < 1:
        raise InvalidArgument("modulus must be positive")
    if q % 8 == 0:
        raise InvalidArgument("moduli divisible by 8 are not supported")
    table = np.ones(q, dtype=complex)
    if q == 1:
        return table
    total = 1
    comps = []
    for p, k in sorted(factorize(q).items()):
        pk = p ** k
        order, logs = _component_logs(pk, p)
        comps.append((pk, order, logs))
        total *= order
    if not 0 <= index < total:
        raise InvalidArgument(f"character index must lie in [0, {total})")
    n = np.arange(q)
    rest = index
    for pk, order, logs in comps:
        e = rest % order
        rest //= order
        lg = logs[n % pk]
        table *= np.where(lg >= 0, np.exp(2j * np.pi * e * lg / order), 0.0)
    # exact values where the phase is real
    table.real[np.abs(table.real) < 1e-15] = 0.0
    table.imag[np.abs(table.imag) < 1e-15] = 0.0
    return table


# ---------------------------------------------------------------- specs


@dataclass(frozen=True)
class MultiplicativeSpec:
    """A bounded multiplicative function described by its prime-power values.

    ``prime_values`` and ``prime_powers`` only matter for ``prime_table``;
    unlisted primes take ``default`` and unlisted prime powers ``f(p)**k``.
    """

    kind: str
    complete: bool = True
    q: int = 1
    index: int = 0
    t: float = 0.0
    prime_values: tuple = ()
    prime_powers: tuple = ()
    default: complex = 1.0
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown kind {self.kind!r}")
        for _, v in self.prime_values + self.prime_powers:
            if abs(v) > 1 + 1e-12:
                raise InvalidArgument("prime values must lie in the unit disc")
        if abs(self.default) > 1 + 1e-12:
            raise InvalidArgument("default value must lie in the unit disc")
        if self.kind == "dirichlet":
            character_table(self.q, self.index)  # validates

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "dirichlet":
            return f"chi_{self.q}_{self.index}"
        if self.kind == "archimedean":
            return f"n^i{self.t:g}"
        return self.kind

    def prime_power(self, p: int, k: int) -> complex:
        """f(p**k) for a prime p and k >= 1."""
        kind = self.kind
        if kind == "liouville":
            return (-1.0) ** k
        if kind == "moebius":
            return -1.0 if k == 1 else 0.0
        if kind == "principal":
            return 1.0
        if kind == "dirichlet":
            return complex(character_table(self.q, self.index)[pow(p, k, self.q)])
        if kind == "archimedean":
            return complex(np.exp(1j * self.t * k * math.log(p)))
        if kind == "sum_two_squares":
            return 0.0 if (p % 4 == 3 and k % 2 == 1) else 1.0
        pv = dict(self.prime_values)
        pp = dict(self.prime_powers)
        if not self.complete and (p, k) in pp:
            return complex(pp[(p, k)])
        return complex(pv.get(p, self.default)) ** k


def liouville() -> MultiplicativeSpec:
    return MultiplicativeSpec("liouville")


def moebius() -> MultiplicativeSpec:
    return MultiplicativeSpec("moebius", complete=False)


def principal() -> MultiplicativeSpec:
    return MultiplicativeSpec("principal")


def dirichlet(q: int, index: int) -> MultiplicativeSpec:
    return MultiplicativeSpec("dirichlet", q=int(q), index=int(index))


def archimedean(t: float) -> MultiplicativeSpec:
    return MultiplicativeSpec("archimedean", t=float(t))


def prime_table(values: dict, complete: bool = True, powers: dict | None = None,
                default: complex = 1.0, name: str = "") -> MultiplicativeSpec:
    pv = tuple(sorted((int(p), complex(v)) for p, v in values.items()))
    pp = tuple(sorted(((int(p), int(k)), complex(v)) for (p, k), v in (powers or {}).items()))
    return MultiplicativeSpec("prime_table", complete=complete, prime_values=pv,
                              prime_powers=pp, default=complex(default), name=name)


def sum_of_two_squares() -> MultiplicativeSpec:
    """Indicator of integers that are sums of two squares (multiplicative)."""
    return MultiplicativeSpec("sum_two_squares", complete=False)


def two_twist() -> MultiplicativeSpec:
    """Completely multiplicative f with f(2) = -1 and f(p) = 1 otherwise."""
    return prime_table({2: -1.0}, name="f2")


# ---------------------------------------------------------------- evaluation


def evaluate(spec: MultiplicativeSpec, n: int, sieve: FactorSieve) -> complex:
    """f(n), with the even extension f(0)=0, f(-n)=f(n)."""
    n = int(n)
    if n == 0:
        return 0j
    n = abs(n)
    if n > sieve.limit:
        raise OutOfRange(f"|n|={n} exceeds sieve limit {sieve.limit}")
    if spec.kind == "archimedean":
        return complex(np.exp(1j * spec.t * math.log(n)))
    if spec.kind == "dirichlet":
        return complex(character_table(spec.q, spec.index)[n % spec.q])
    val = 1 + 0j
    for p, k in sieve.factor(n).items():
        val *= spec.prime_power(p, k)
        if val == 0:
            return 0j
    return val


def _prime_power_array(spec: MultiplicativeSpec, p: np.ndarray, k: np.ndarray) -> np.ndarray:
    kind = spec.kind
    if kind == "liouville":
        return np.where(k % 2 == 1, -1.0, 1.0).astype(complex)
    if kind == "moebius":
        return np.where(k == 1, -1.0, 0.0).astype(complex)
    if kind == "principal":
        return np.ones(p.shape, dtype=complex)
    if kind == "sum_two_squares":
        return np.where((p % 4 == 3) & (k % 2 == 1), 0.0, 1.0).astype(complex)
    if kind == "prime_table":
        pv = np.full(p.shape, complex(spec.default))
        for q, v in spec.prime_values:
            pv[p == q] = v
        out = pv ** k
        if not spec.complete:
            for (q, e), v in spec.prime_powers:
                out[(p == q) & (k == e)] = v
        return out
    raise AssertionError(kind)


def tabulate_values(spec: MultiplicativeSpec, N: int, sieve: FactorSieve, power: int = 1) -> np.ndarray:
    """Array ``v`` of length N+1 with ``v[n] = f(n**power)`` and ``v[0] = 0``.

    Each n is resolved as f(p^k)·f(rest) with p = spf(n); processing [L, 2L)
    blocks in order guarantees every dependency is already filled, so the pass
    is linear and vectorized.
    """
    N, power = int(N), int(power)
    if N > sieve.limit:
        raise OutOfRange(f"N={N} exceeds sieve limit {sieve.limit}")
    if power < 0:
        raise InvalidArgument("power must be nonnegative")
    n = np.arange(N + 1, dtype=np.int64)
    out = np.zeros(N + 1, dtype=complex)
    if N >= 1:
        out[1] = 1.0
    if power == 0:
        out[1:] = 1.0
        return out
    if spec.kind == "archimedean":
        out[1:] = np.exp(1j * spec.t * power * np.log(n[1:].astype(float)))
        return out
    if spec.kind == "dirichlet":
        tab = character_table(spec.q, spec.index)
        out[1:] = tab[n[1:] % spec.q] ** power
        return out
    if spec.kind == "principal":
        out[1:] = 1.0
        return out
    spf = sieve.spf
    k = np.zeros(N + 1, dtype=np.int64)
    rest = np.ones(N + 1, dtype=np.int64)
    lo = 2
    while lo <= N:
        hi = min(2 * lo, N + 1)
        m = n[lo:hi]
        p = spf[lo:hi]
        q = m // p
        same = (q > 1) & (spf[q] == p)
        k[lo:hi] = np.where(same, k[q] + 1, 1)
        rest[lo:hi] = np.where(same, rest[q], q)
        out[lo:hi] = _prime_power_array(spec, p, k[lo:hi] * power) * out[rest[lo:hi]]
        lo = hi
    return out


@dataclass(frozen=True)
class FunctionTable:
    """Values f(1..N); ``values[n-1] = f(n)``."""

    N: int
    values: np.ndarray = field(repr=False)
    even: bool = True
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.N,):
            raise InvalidArgument("values must have length N")
        if np.any(np.abs(v) > 1 + 1e-12):
            raise InvalidArgument("table values must lie in the unit disc")
        object.__setattr__(self, "values", v)

    def at(self, n: int) -> complex:
        n = int(n)
        if n == 0:
            return 0j
        if n < 0:
            if not self.even:
                raise OutOfRange("negative index without even extension")
            n = -n
        if n > self.N:
            raise OutOfRange(f"n={n} outside [1, {self.N}]")
        return complex(self.values[n - 1])

    def extended(self) -> np.ndarray:
        """Values on -N..N (index n+N) with f(0)=0, f(-n)=f(n)."""
        return np.concatenate([self.values[::-1], [0j], self.values])

    def embed(self, modulus: int) -> np.ndarray:
        """f_N on Z_modulus: f(n) at residue n for n in [N], zero elsewhere."""
        if modulus <= self.N:
            raise InvalidArgument("modulus must exceed N")
        out = np.zeros(modulus, dtype=complex)
        out[1:self.N + 1] = self.values
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "re", "im"])
        for i, v in enumerate(self.values, start=1):
            w.writerow([i, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, label: str = "") -> "FunctionTable":
        # '#' lines carry the CLI provenance header
        body = [ln for ln in text.splitlines() if not ln.startswith("#")]
        rows = list(csv.DictReader(body))
        ns = [int(r["n"]) for r in rows]
        if ns != list(range(1, len(ns) + 1)):
            raise InvalidArgument("CSV table must list n = 1..N in order")
        vals = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        return cls(len(ns), vals, label=label)


def tabulate(spec: MultiplicativeSpec, N: int, sieve: FactorSieve | None = None) -> FunctionTable:
    sieve = sieve if sieve is not None else build_sieve(max(int(N), 2))
    vals = tabulate_values(spec, N, sieve)[1:]
    return FunctionTable(int(N), vals, label=spec.label)


def progression_mean(table: FunctionTable, a: int, b: int) -> complex:
    """Mean of f(an+b) over n >= 1 with an+b <= N."""
    a, b = int(a), int(b)
    if a < 1 or b < 0:
        raise InvalidArgument("need a >= 1 and b >= 0")
    idx = np.arange(a + b, table.N + 1, a)
    if idx.size == 0:
        raise EmptyDomainError("progression does not meet [1, N]")
    return complex(table.values[idx - 1].mean())


def prime_values(spec: MultiplicativeSpec, primes: Sequence[int]) -> np.ndarray:
    ps = np.asarray(primes, dtype=np.int64)
    if spec.kind == "archimedean":
        return np.exp(1j * spec.t * np.log(ps.astype(float)))
    if spec.kind == "dirichlet":
        return character_table(spec.q, spec.index)[ps % spec.q]
    return _prime_power_array(spec, ps, np.ones_like(ps))


def pretension_distance_partial(f: MultiplicativeSpec, g: MultiplicativeSpec,
                                prime_limit: int, t: float = 0.0) -> float:
    """Sum over p <= prime_limit of (1 - Re f(p) conj(g(p) p^{it})) / p."""
    prime_limit = int(prime_limit)
    if prime_limit < 2:
        raise InvalidArgument("prime_limit must be at least 2")
    ps = build_sieve(prime_limit).primes()
    twist = np.exp(1j * t * np.log(ps.astype(float)))
    terms = (1.0 - np.real(prime_values(f, ps) * np.conj(prime_values(g, ps) * twist))) / ps
    return float(math.fsum(terms))


# ---------------------------------------------------------------- text config

_SHORTHAND = {
    "liouville": liouville,
    "moebius": moebius,
    "mobius": moebius,
    "principal": principal,
    "chi3": lambda: dirichlet(3, 1),
    "chi4": lambda: dirichlet(4, 1),
    "f2": two_twist,
    "sum2sq": sum_of_two_squares,
}


def parse_spec(text: str) -> MultiplicativeSpec:
    """Parse ``liouville`` or ``kind=dirichlet,q=5,index=2`` style specs.

    prime_table entries use ``p<prime>=<value>`` and ``p<prime>^<k>=<value>``;
    complex values use Python syntax, e.g. ``p3=-1j``.  Lines or commas separate
    pairs, so a whole config file can be passed.
    """
    text = text.strip()
    if text.lower() in _SHORTHAND:
        return _SHORTHAND[text.lower()]()
    pairs = [s.strip() for s in text.replace("\n", ",").split(",")]
    kv = {}
    for s in pairs:
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise InvalidArgument(f"expected key=value, got {s!r}")
        k, v = s.split("=", 1)
        kv[k.strip().lower()] = v.strip()
    kind = kv.pop("kind", None)
    if kind is None:
        raise InvalidArgument("spec needs a kind")
    try:
        if kind in _SHORTHAND:
            return _SHORTHAND[kind]()
        if kind == "dirichlet":
            return dirichlet(int(kv["q"]), int(kv.get("index", 1)))
        if kind == "archimedean":
            return archimedean(float(kv["t"]))
        if kind == "prime_table":
            complete = kv.pop("complete", "true").lower() in ("1", "true", "yes")
            default = complex(kv.pop("default", "1"))
            vals, pows = {}, {}
            for k, v in kv.items():
                if not k.startswith("p"):
                    raise InvalidArgument(f"unknown prime_table key {k!r}")
                if "^" in k:
                    p, e = k[1:].split("^")
                    pows[(int(p), int(e))] = complex(v)
                else:
                    vals[int(k[1:])] = complex(v)
            return prime_table(vals, complete=complete, powers=pows, default=default)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, InvalidArgument):
            raise
        raise InvalidArgument(f"bad spec {text!r}: {exc}") from exc
    raise InvalidArgument(f"unknown kind {kind!r}")


def standard_family() -> list[MultiplicativeSpec]:
    """Liouville, Moebius, Principal and the nonprincipal character mod 3."""
    return [liouville(), moebius(), principal(), dirichlet(3, 1)]


def tabulate_family(family: Iterable[MultiplicativeSpec], N: int,
                    sieve: FactorSieve | None = None) -> list[FunctionTable]:
    sieve = sieve if sieve is not None else build_sieve(max(int(N), 2))
    return [tabulate(f, N, sieve) for f in family]
