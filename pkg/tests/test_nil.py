import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hofa.arith import archimedean, dirichlet, liouville, moebius, principal
from hofa.errors import InvalidArgument
from hofa.nil import (IDENTITY, HeisenbergElement, TorusPoly, daboussi_check, default_characters,
                      equidistribution_diagnostic, heis_inv, heis_reduce,
                      horizontal_character, orbit, poly_shift, shift_bound, shift_bound_negative,
                      smoothness_norm)

coord = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
elements = st.builds(HeisenbergElement, coord, coord, coord)


def close(g, h, tol=1e-9):
    return np.allclose(g.as_tuple(), h.as_tuple(), atol=tol, rtol=0)


@given(elements, elements, elements)
def test_associativity(g, h, k):
    assert close((g * h) * k, g * (h * k), 1e-9)


@given(elements)
def test_inverse(g):
    assert close(g * heis_inv(g), IDENTITY, 1e-9)
    assert close(heis_inv(g) * g, IDENTITY, 1e-9)


def test_group_law_by_matrices():
    # (x, y, z) <-> [[1, x, z], [0, 1, y], [0, 0, 1]]
    def mat(g):
        return np.array([[1, g.x, g.z], [0, 1, g.y], [0, 0, 1]])
    g, h = HeisenbergElement(0.3, -1.2, 2.5), HeisenbergElement(1.7, 0.4, -0.9)
    p = mat(g) @ mat(h)
    assert close(g * h, HeisenbergElement(p[0, 1], p[1, 2], p[0, 2]), 1e-12)


@pytest.mark.parametrize("g,gamma,point", [((0, 0, 0), (0, 0, 0), (0, 0, 0)),
                                           ((1.5, 0, 0), (-1, 0, 0), (0.5, 0, 0))])
def test_reduce_examples(g, gamma, point):
    gm, p = heis_reduce(HeisenbergElement(*map(float, g)))
    assert gm == gamma
    assert p.as_tuple() == pytest.approx(point)


@given(elements)
def test_reduce_lands_in_box_and_reconstructs(g):
    gamma, p = heis_reduce(g)
    assert all(0 <= v < 1 for v in p.as_tuple())
    back = p * heis_inv(HeisenbergElement(*map(float, gamma)))
    assert close(back, g, 1e-9 * (1 + abs(g.x) * abs(g.y) + abs(g.z)))


def test_reduce_mixed_example():
    g = HeisenbergElement(0.3, 2.7, 5.21)
    gamma, p = heis_reduce(g)
    assert gamma == (0, -2, -4)
    assert all(0 <= v < 1 for v in p.as_tuple())
    assert close(p * heis_inv(HeisenbergElement(*map(float, gamma))), g, 1e-12)


def test_parse():
    assert HeisenbergElement.parse("1,2.5,-3") == HeisenbergElement(1, 2.5, -3)
    for bad in ("1,2", "a,b,c"):
        with pytest.raises(InvalidArgument):
            HeisenbergElement.parse(bad)


# ---------------------------------------------------------------- orbits


def test_identity_orbit():
    assert np.all(orbit(IDENTITY, 50) == 0)


def test_abelian_orbit():
    a = math.sqrt(2) - 1
    pts = orbit(HeisenbergElement(a, 0, 0), 1000)
    n = np.arange(1, 1001)
    assert np.allclose(pts[:, 0], np.mod(n * a, 1.0), atol=1e-9)
    assert np.all(pts[:, 1:] == 0)


def test_orbit_matches_float_iteration_short():
    a = HeisenbergElement(math.sqrt(2), math.sqrt(3), 0.25)
    pts = orbit(a, 30)
    g = IDENTITY
    for n in range(30):
        _, p = heis_reduce(a * g)
        g = p
        assert np.allclose(pts[n], p.as_tuple(), atol=1e-9)


def test_orbit_routes_agree():
    a = HeisenbergElement(math.sqrt(2), math.sqrt(3), 0.0)
    it, cl = orbit(a, 10_000), orbit(a, 10_000, "closed")
    assert np.abs(it - cl).max() <= 1e-8
    assert np.all((it >= 0) & (it < 1))


def test_orbit_errors():
    with pytest.raises(InvalidArgument):
        orbit(IDENTITY, 0)
    with pytest.raises(InvalidArgument):
        orbit(IDENTITY, 5, "magic")


def test_rational_orbit_is_periodic():
    pts = orbit(HeisenbergElement(0.5, 0.25, 0.125), 64, "closed")
    # a^8 has integer x, y and z = 8·0.125 + 28·0.125 = 4.5, so the period is 16
    assert np.array_equal(pts[:16], pts[16:32])


# ---------------------------------------------------------------- torus polynomials


@pytest.mark.parametrize("coeffs,N,expected", [([[0.0], [1 / 200]], 100, 0.5),
                                               ([[0.0], [0.0], [1e-4]], 100, 1.0),
                                               ([[0.0], [0.0], [0.0]], 100, 0.0)])
def test_smoothness_examples(coeffs, N, expected):
    assert smoothness_norm(TorusPoly(coeffs), N) == pytest.approx(expected)


def test_coefficients_reduced():
    p = TorusPoly([[1.25, -0.5], [3.75, 2.0]])
    assert np.all((p.coeffs >= 0) & (p.coeffs < 1))
    assert p.degree == 1 and p.dim == 2


polys = st.integers(1, 4).flatmap(lambda d: st.lists(
    st.lists(st.floats(0, 1, exclude_max=True), min_size=2, max_size=2), min_size=d + 1, max_size=d + 1))


@given(polys, st.integers(2, 400), st.integers(2, 400))
def test_smoothness_scaling(coeffs, N1, N2):
    p = TorusPoly(coeffs)
    Ns, Nl = sorted((N1, N2))
    small, large = smoothness_norm(p, Ns), smoothness_norm(p, Nl)
    assert small <= large * (1 + 1e-12)
    assert large <= (Nl / Ns) ** p.degree * small * (1 + 1e-12)


@given(polys, st.integers(-40, 40))
def test_poly_values(coeffs, n):
    p = TorusPoly(coeffs)
    ref = sum(math.comb(n, j) * np.array(c) if n >= 0 else
              (-1) ** j * math.comb(j - n - 1, j) * np.array(c) for j, c in enumerate(p.coeffs))
    d = np.abs(np.mod(ref, 1.0) - p(n))
    assert np.all(np.minimum(d, 1 - d) < 1e-6)


def test_shift_examples():
    p = TorusPoly([[0.1], [0.3]])
    assert np.array_equal(poly_shift(p, 0).coeffs, p.coeffs)
    q = poly_shift(TorusPoly([[0.0], [0.3]]), 1)
    assert np.allclose(q.coeffs, [[0.3], [0.3]])


@given(polys, st.integers(-6, 6), st.integers(-20, 20))
def test_shift_is_translation(coeffs, b, n):
    p = TorusPoly(coeffs)
    d = np.abs(poly_shift(p, b)(n) - p(n + b))
    assert np.all(np.minimum(d, 1 - d) < 1e-6)


@pytest.mark.parametrize("b", [5, -5])
def test_shift_bound_random_cubic(rng, b):
    N = 100
    for _ in range(50):
        p = TorusPoly(rng.random((4, 2)) / N ** np.arange(4)[:, None])
        lhs = smoothness_norm(poly_shift(p, b), N)
        bound = shift_bound(b, N) if b >= 0 else shift_bound_negative(b, N)
        assert lhs <= bound * smoothness_norm(p, N) + 1e-9


def test_negative_shift_counterexample():
    # α = (0, 1/N, -1/N², 1/N³), b = -1: the (N+1)/N factor is exceeded
    N = 100
    p = TorusPoly([[0.0], [1 / N], [-1 / N ** 2], [1 / N ** 3]])
    lhs = smoothness_norm(poly_shift(p, -1), N)
    assert lhs > shift_bound(-1, N) * smoothness_norm(p, N) + 1e-9
    assert lhs <= shift_bound_negative(-1, N) * smoothness_norm(p, N) + 1e-9


@given(polys)
def test_monomial_round_trip(coeffs):
    p = TorusPoly(coeffs)
    q = TorusPoly.from_monomial(p.to_monomial())
    d = np.abs(q.coeffs - p.coeffs)
    assert np.all(np.minimum(d, 1 - d) < 1e-9)


def test_monomial_values():
    p = TorusPoly([[0.1], [0.2], [0.35]])
    beta = p.to_monomial()
    for n in range(-5, 6):
        val = sum(beta[k] * n ** k for k in range(3)) % 1.0
        assert min(abs(val - p(n)), 1 - abs(val - p(n))) < 1e-9


# ---------------------------------------------------------------- diagnostics


def test_default_characters():
    chars = default_characters(2)
    freqs = {c.frequency for c in chars}
    assert len(freqs) == len(chars) == 30  # 60 nonzero k with |k|_1 <= 5, halved
    assert all((-k1, -k2) not in freqs for k1, k2 in freqs)


def test_constant_sequence():
    pts = np.tile([0.3, 0.0, 0.0], (1000, 1))
    phi = horizontal_character((1,))
    res = equidistribution_diagnostic(pts, [phi], budget=3)
    assert res.value == pytest.approx(1.0)


def test_golden_rotation():
    n = np.arange(1, 100_001)
    pts = np.mod(n * (1 + math.sqrt(5)) / 2, 1.0)
    assert equidistribution_diagnostic(pts, budget=10).value < 0.01


def test_half_rotation():
    n = np.arange(1, 10_001)
    res = equidistribution_diagnostic(np.mod(n / 2, 1.0), budget=10)
    assert res.value >= 0.49


def test_diagnostic_against_direct_prefix(rng):
    pts = rng.random((200, 2))
    phi = horizontal_character((1, 2))
    res = equidistribution_diagnostic(pts, [phi], budget=4)
    v = phi(pts)
    ref = 0.0
    for q in range(1, 5):
        for s in range(1, q + 1):
            sub = v[s - 1::q]
            for L in range(math.ceil(200 / 16), sub.size + 1):
                ref = max(ref, abs(sub[:L].sum()) / 200)
    assert res.value == pytest.approx(ref)


def test_daboussi_principal_rotation(sieve):
    a = HeisenbergElement(math.sqrt(2), 0.0, 0.0)
    val, per = daboussi_check(a, horizontal_character((1,)), [principal()], 100_000, sieve)
    assert val < 0.01 and set(per) == {"principal"}


def test_daboussi_zero_test_function(sieve):
    a = HeisenbergElement(math.sqrt(2), math.sqrt(3), 0.0)
    zero = lambda pts: np.zeros(len(pts))
    assert daboussi_check(a, zero, [liouville()], 1000, sieve)[0] == 0


def test_daboussi_direct_sum(sieve):
    a = HeisenbergElement(math.sqrt(2), math.sqrt(3), 0.0)
    fam = [liouville(), moebius(), dirichlet(3, 1), archimedean(1.0)]
    val, per = daboussi_check(a, None, fam, 2000, sieve)
    pts = orbit(a, 2000)
    phi = np.exp(2j * np.pi * (pts[:, 0] + pts[:, 1]))
    lam = np.array([(-1) ** sum(e for _, e in _factor(n)) for n in range(1, 2001)])
    assert per["liouville"] == pytest.approx(abs(np.mean(lam * phi)), abs=1e-12)
    assert val == max(per.values())
    with pytest.raises(InvalidArgument):
        daboussi_check(a, None, [], 10)


def _factor(n):
    out, p = [], 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out
