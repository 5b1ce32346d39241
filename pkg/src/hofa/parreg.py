"""Ternary quadratic forms: eligibility, parametric solution families, searches.

The form is p(x, y, z) = a x² + b y² + c z² + d xy + e xz + f yz.  All identity
checks are exact integer evaluations on grids large enough that vanishing on the
grid forces the polynomial identity.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgument, NotEligible, SizeLimitError, VerificationError

FIRST_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)
# (M+1)^M divisors as Python ints; M = 8 would need 43M big integers.
FOLNER_MAX_SIZE = 10 ** 7


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True)
class QuadraticForm3:
    a: int
    b: int
    c: int
    d: int
    e: int
    f: int

    def __call__(self, x, y, z):
        a, b, c, d, e, f = self.coeffs
        return a * x * x + b * y * y + c * z * z + d * x * y + e * x * z + f * y * z

    @property
    def coeffs(self) -> tuple:
        return (self.a, self.b, self.c, self.d, self.e, self.f)

    @classmethod
    def parse(cls, text: str) -> "QuadraticForm3":
        try:
            vals = [int(v) for v in text.replace(" ", "").split(",")]
        except ValueError as exc:
            raise InvalidArgument(f"bad form {text!r}: expected six integers") from exc
        if len(vals) != 6:
            raise InvalidArgument(f"bad form {text!r}: expected six integers")
        return cls(*vals)

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.coeffs)


def discriminants(form: QuadraticForm3) -> tuple[int, int, int]:
    a, b, c, d, e, f = form.coeffs
    return e * e - 4 * a * c, f * f - 4 * b * c, (e + f) ** 2 - 4 * c * (a + b + d)


def is_eligible(form: QuadraticForm3) -> bool:
    if 0 in (form.a, form.b, form.c):
        return False
    return all(D != 0 and is_square(D) for D in discriminants(form))


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class ParamFamily:
    """x = k ℓ0 (m+ℓ1 n)(m+ℓ2 n), y = signY k ℓ0 (m+ℓ3 n)(m+ℓ4 n), λ = k(A m² + B mn + C n²)."""

    ell: tuple  # (ℓ0, ℓ1, ℓ2, ℓ3, ℓ4)
    sign_y: int
    lambda_poly: tuple  # (A, B, C)
    source: QuadraticForm3
    branch: str = ""

    def x(self, k, m, n):
        l0, l1, l2, _, _ = self.ell
        return k * l0 * (m + l1 * n) * (m + l2 * n)

    def y(self, k, m, n):
        l0, _, _, l3, l4 = self.ell
        return self.sign_y * k * l0 * (m + l3 * n) * (m + l4 * n)

    def lam(self, k, m, n):
        A, B, C = self.lambda_poly
        return k * (A * m * m + B * m * n + C * n * n)

    def triple(self):
        return (self.x, self.y, self.lam)

    @property
    def admissible(self) -> bool:
        return is_admissible(self.ell)


def is_admissible(ell: Sequence[int]) -> bool:
    l0, l1, l2, l3, l4 = ell
    return l0 > 0 and l1 != l2 and l3 != l4 and {l1, l2} != {l3, l4}


@dataclass(frozen=True)
class Verification:
    ok: bool
    witness: tuple | None
    radius: int
    points: int


def verify_family(poly: Callable, triple: Sequence[Callable], radius: int = 4,
                  nvars: int = 3) -> Verification:
    """Evaluate poly(x(k,m,n), y(...), λ(...)) exactly on |k|,|m|,|n| <= radius.

    ``triple`` may hold any number of parametrizations (each a callable of the
    ``nvars`` parameters); ``poly`` takes that many arguments.  Python integers
    make the evaluation exact at any size.
    """
    radius = int(radius)
    if radius < 0:
        raise InvalidArgument("radius must be nonnegative")
    rng = range(-radius, radius + 1)
    count = 0
    for pt in itertools.product(rng, repeat=nvars):
        vals = [g(*pt) for g in triple]
        count += 1
        if poly(*vals) != 0:
            return Verification(False, pt, radius, count)
    return Verification(True, None, radius, count)


def _step2(A: int, B: int, C: int, D: int, literal_l34: bool):
    """Closed-form ℓ0..ℓ4 and λ coefficients for A x² + B y² + C z² + D xy (A > 0, C < 0).

    ``literal_l34`` selects ℓ3, ℓ4 = -(A + D ± Δ2'); otherwise A + D ± Δ2'.
    """
    S = A + B + D
    vals = (B * S, A * S, -C * S)
    if not all(is_square(v) for v in vals):
        raise NotEligible("Step 2 square roots are not integral")
    d1, d2, d3 = (math.isqrt(v) for v in vals)
    l0, l1, l2 = -C, -(B + d1), -(B - d1)
    if literal_l34:
        l3, l4 = -(A + D + d2), -(A + D - d2)
    else:
        l3, l4 = A + D + d2, A + D - d2
    return (l0, l1, l2, l3, l4), (d3, d3 * D, d3 * A * B)


def _branches(form: QuadraticForm3):
    """Candidate families in a fixed order; the verifier picks the first that works."""
    a, b, c, d, e, f = form.coeffs
    if e == 0 and f == 0:
        A, B, C, D = a, b, c, d
        scale, shift_e, shift_f = 1, 0, 0
    else:
        A, B, C, D = c * (4 * a * c - e * e), c * (4 * b * c - f * f), c, 2 * c * (2 * c * d - e * f)
        scale, shift_e, shift_f = 2 * c, e, f
    if A < 0:
        A, B, C, D = -A, -B, -C, -D
    if C >= 0:
        raise NotEligible("reduced form does not have opposite-sign a and c")
    # printed ℓ3/ℓ4 signs first, then the sign-corrected pair; signY = +1 before -1
    order = [("literal", True, 1), ("literal", True, -1), ("corrected", False, 1), ("corrected", False, -1)]
    for name, literal, sy in order:
        ell, lamc = _step2(A, B, C, D, literal)
        l0, l1, l2, l3, l4 = ell
        # x' = l0 (m² + (l1+l2) mn + l1 l2 n²), y' = sy l0 (m² + (l3+l4) mn + l3 l4 n²)
        xq = (l0, l0 * (l1 + l2), l0 * l1 * l2)
        yq = (sy * l0, sy * l0 * (l3 + l4), sy * l0 * l3 * l4)
        if scale == 1:
            lam = lamc
            ell_out = ell
        else:
            # undo p'(x,y,z) = p(2c x, 2c y, z - e x - f y); flip all signs if c < 0
            sgn = 1 if scale > 0 else -1
            lam = tuple(sgn * (lamc[i] - shift_e * xq[i] - shift_f * yq[i]) for i in range(3))
            ell_out = (abs(scale) * l0, l1, l2, l3, l4)
        yield f"{name},signY={sy:+d}", ell_out, sy, lam


def parametrize(form: QuadraticForm3, radius: int = 4) -> ParamFamily:
    """First verified, admissible family among the documented branches.

    Raises NotEligible for ineligible forms and VerificationError (with a
    witness) if no branch survives the exact check.
    """
    if not is_eligible(form):
        raise NotEligible(f"form {form} is not eligible")
    last_witness = None
    for name, ell, sy, lam in _branches(form):
        fam = ParamFamily(tuple(int(v) for v in ell), sy, tuple(int(v) for v in lam), form, name)
        if not fam.admissible:
            continue
        v = verify_family(form, fam.triple(), radius)
        if v.ok:
            return fam
        last_witness = v.witness
    raise VerificationError(f"no branch verified for {form}", witness=last_witness)


def random_eligible_form(rng: np.random.Generator, size: int = 6, max_tries: int = 100000) -> QuadraticForm3:
    """Eligible form built backwards from chosen square discriminants."""
    for _ in range(max_tries):
        c = int(rng.integers(-size, size + 1))
        e, f = (int(v) for v in rng.integers(-size, size + 1, 2))
        s1, s2, s3 = (int(v) for v in rng.integers(1, 3 * size, 3))
        if c == 0:
            continue
        na, nb = e * e - s1 * s1, f * f - s2 * s2
        if na % (4 * c) or nb % (4 * c):
            continue
        a, b = na // (4 * c), nb // (4 * c)
        nd = (e + f) ** 2 - s3 * s3
        if nd % (4 * c):
            continue
        d = nd // (4 * c) - a - b
        form = QuadraticForm3(a, b, c, d, e, f)
        if is_eligible(form):
            return form
    raise RuntimeError("no eligible form found")


# ---------------------------------------------------------------- Følner sets


def _folner_size(M: int) -> int:
    return (M + 1) ** M


def folner_exponents(M: int) -> np.ndarray:
    M = int(M)
    if M < 1:
        raise InvalidArgument("M must be positive")
    if M > len(FIRST_PRIMES) or _folner_size(M) > FOLNER_MAX_SIZE:
        raise SizeLimitError(f"(M+1)^M = {_folner_size(M)} is beyond the size limit")
    grids = np.meshgrid(*[np.arange(M + 1)] * M, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def folner_set(M: int) -> list[int]:
    """Sorted divisors of (p_1 ⋯ p_M)^M."""
    ex = folner_exponents(M)
    ps = FIRST_PRIMES[:int(M)]
    # integer powers via Python ints; values overflow int64 from M = 6 on
    pw = [[p ** k for k in range(M + 1)] for p in ps]
    out = []
    for row in ex.tolist():
        v = 1
        for j, k in enumerate(row):
            v *= pw[j][k]
        out.append(v)
    out.sort()
    return out


def mult_density(predicate: Callable[[int], bool], M: int) -> float:
    phi = folner_set(M)
    return sum(1 for n in phi if predicate(n)) / len(phi)


def dilation_defect(r_num: int, r_den: int, M: int) -> float:
    """|r·Φ_M Δ Φ_M| / |Φ_M| for the rational r = r_num / r_den."""
    phi = set(folner_set(M))
    image = {Fraction(n * r_num, r_den) for n in phi}
    return len(image.symmetric_difference(phi)) / len(phi)


# ---------------------------------------------------------------- searches


def seven_adic_cell(n: int) -> int:
    """Least-significant nonzero base-7 digit of n >= 1."""
    n = int(n)
    while n % 7 == 0:
        n //= 7
    return n % 7


def trivial_cell(n: int) -> int:
    return 0


PARTITIONS = {"trivial": trivial_cell, "7adic": seven_adic_cell}


def residue_partition(k: int) -> Callable[[int], int]:
    return lambda n: int(n) % k


def _cells_array(cells: Callable[[int], int], bound: int) -> np.ndarray:
    if cells is seven_adic_cell:
        n = np.arange(bound + 1, dtype=np.int64)
        n[0] = 1
        while True:
            sel = n % 7 == 0
            if not sel.any():
                break
            n[sel] //= 7
        return n % 7
    return np.array([cells(i) if i else -1 for i in range(bound + 1)], dtype=np.int64)


def _isqrt_array(D: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(D.astype(float))).astype(np.int64)
    r = np.where(r * r > D, r - 1, r)
    r = np.where((r + 1) * (r + 1) <= D, r + 1, r)
    return r


def search_monochromatic(cells: Callable[[int], int], form: QuadraticForm3, bound: int,
                         ) -> list[tuple[int, int, int, int]]:
    """All (x, y, λ, cell) with x ≠ y in [1, bound], one cell, λ >= 0 integral.

    λ solves c λ² + (e x + f y) λ + (a x² + b y² + d xy) = 0; roots come from an
    exact integer square root of the discriminant.
    """
    bound = int(bound)
    if bound < 2:
        raise InvalidArgument("bound must be at least 2")
    a, b, c, d, e, f = form.coeffs
    if max(abs(v) for v in form.coeffs) * 16 * bound ** 4 >= 2 ** 62:
        raise InvalidArgument("bound too large for exact 64-bit search")
    col = _cells_array(cells, bound)
    ys = np.arange(1, bound + 1, dtype=np.int64)
    hits = []
    for x in range(1, bound + 1):
        same = (col[ys] == col[x]) & (ys != x)
        y = ys[same]
        if y.size == 0:
            continue
        B = e * x + f * y
        C0 = a * x * x + b * y * y + d * x * y
        if c == 0:
            with np.errstate(divide="ignore", invalid="ignore"):
                ok = (B != 0) & (C0 % np.where(B == 0, 1, B) == 0)
            lam = np.where(ok, -C0 // np.where(B == 0, 1, B), -1)
            zero = (B == 0) & (C0 == 0)  # every λ works; report λ = 0
            lam = np.where(zero, 0, lam)
            keep = (ok | zero) & (lam >= 0)
            for yy, ll in zip(y[keep], lam[keep]):
                hits.append((x, int(yy), int(ll), int(col[x])))
            continue
        D = B * B - 4 * c * C0
        nonneg = D >= 0
        r = _isqrt_array(np.where(nonneg, D, 0))
        sq = nonneg & (r * r == D)
        for sgn in (1, -1):
            num = -B + sgn * r
            ok = sq & (num % (2 * c) == 0)
            lam = num // (2 * c)
            keep = ok & (lam >= 0)
            if sgn == -1:
                keep &= r != 0  # double root already reported
            for yy, ll in zip(y[keep], lam[keep]):
                hits.append((x, int(yy), int(ll), int(col[x])))
    hits.sort()
    return hits
