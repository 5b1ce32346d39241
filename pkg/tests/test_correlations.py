import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hofa.arith import (archimedean, dirichlet, liouville, moebius, next_prime,
                        principal, sum_of_two_squares, tabulate)
from hofa.errors import ArithmeticOverflow, InvalidArgument
from hofa.correlations import (LinearFormSet, chowla_average, chowla_average_reference,
                               linear_forms_average, quad_phase_correlation, quad_phase_scan,
                               region_points, two_phase_closed_form, uniformity_bound_report)
from hofa.structure import KernelParams, decompose, structured_kernel

FORMS = LinearFormSet.parse("1,0;1,1")


def test_form_set_parse_and_independence():
    fs = LinearFormSet.parse("1,0;1,1;2,2")
    assert fs.forms == ((1, 0), (1, 1), (2, 2))
    assert fs.independent(0, 1) and not fs.independent(1, 2)
    assert len(LinearFormSet.parse("")) == 0
    for bad in ("1,2,3", "a,b"):
        with pytest.raises(InvalidArgument):
            LinearFormSet.parse(bad)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_principal_is_one(d):
    assert chowla_average(principal(), d, [1, 0, 0, 1], 2, FORMS, 30).value == 1


def test_sum_of_two_squares_indicator_is_exactly_one():
    res = chowla_average(sum_of_two_squares(), 1, [1, 0, 0, 1], 1, LinearFormSet(()), 200)
    assert res.value == 1
    assert res.count == 200 ** 2


@pytest.mark.parametrize("f", [liouville(), moebius(), dirichlet(5, 1), archimedean(0.5)])
@pytest.mark.parametrize("region,d,matrix", [("square", 1, [1, 0, 0, 1]), ("square", 3, [2, 1, 1, 1]),
                                             ("ball", 1, [1, 0, 0, 1]), ("ball", 7, [1, 1, 0, 1])])
def test_chowla_matches_pointwise_reference(f, region, d, matrix):
    N = 24
    fast = chowla_average(f, d, matrix, 1, FORMS, N, region).value
    slow = chowla_average_reference(f, d, matrix, 1, FORMS, N, region)
    assert fast == pytest.approx(slow, abs=1e-12)


def test_rectangle_region():
    fast = chowla_average(liouville(), 2, [1, 0, 0, 1], 2, FORMS, 0, "rectangle", rect=(-5, 9, 1, 12))
    slow = chowla_average_reference(liouville(), 2, [1, 0, 0, 1], 2, FORMS, 0, "rectangle", rect=(-5, 9, 1, 12))
    assert fast.value == pytest.approx(slow, abs=1e-12)
    assert fast.count == 15 * 12
    with pytest.raises(InvalidArgument):
        region_points("rectangle", 5, 1, [1, 0, 0, 1])
    with pytest.raises(InvalidArgument):
        region_points("triangle", 5, 1, [1, 0, 0, 1])


def test_trivial_forms_give_plain_mean():
    N = 40
    res = chowla_average(liouville(), 1, [1, 0, 0, 1], 1, LinearFormSet(()), N)
    g = np.arange(1, N + 1)
    M, Nn = np.meshgrid(g, g)
    q = (M * M + Nn * Nn).ravel()
    lam = tabulate(liouville(), int(q.max())).values
    assert res.value == pytest.approx(lam[q - 1].mean())


def test_chowla_errors():
    with pytest.raises(InvalidArgument):
        chowla_average(liouville(), 1, [2, 0, 0, 1], 1, FORMS, 10)
    with pytest.raises(InvalidArgument):
        chowla_average(liouville(), 1, [1, 0, 0, 1], -1, FORMS, 10)
    with pytest.raises(ArithmeticOverflow):
        chowla_average(liouville(), 1, [1, 0, 0, 1], 20, FORMS, 100)


def test_ball_region_points_are_in_ball():
    M, Nn = region_points("ball", 10, 3, [1, 1, 0, 1])
    u, v = M + Nn, Nn
    assert np.all(u * u + u * v + v * v <= 100)
    assert M.size == len({(int(a), int(b)) for a, b in zip(M, Nn)})


# ---------------------------------------------------------------- Z_Ñ averages


def test_all_ones_average():
    N, Nt = 20, 127
    ones = np.ones(Nt)
    assert linear_forms_average([ones] * 3, [0, 1, 2], N, Nt) == pytest.approx(N / Nt)
    with pytest.raises(InvalidArgument):
        linear_forms_average([ones] * 3, [0, 1, 2], N, 113)
    with pytest.raises(InvalidArgument):
        linear_forms_average([ones] * 2, [0, 1, 2], N, Nt)


def direct_average(tables, shifts, N, Nt):
    total = 0j
    for m in range(Nt):
        for n in range(1, N + 1):
            p = 1 + 0j
            for a, l in zip(tables, shifts):
                p *= a[(m + l * n) % Nt]
            total += p
    return total / Nt ** 2


def test_average_matches_direct(rng):
    N, Nt = 6, 53
    tabs = [np.exp(2j * np.pi * rng.random(Nt)) for _ in range(3)]
    assert linear_forms_average(tabs, [0, 1, -3], N, Nt) == pytest.approx(direct_average(tabs, [0, 1, -3], N, Nt))


@pytest.mark.parametrize("xi1,xi2,l1,l2", [(3, -3, 0, 1), (5, 7, 1, 2), (4, -4, 2, 2), (10, -10, 1, 3)])
def test_two_phase_closed_form(xi1, xi2, l1, l2):
    N, Nt = 10, 101
    m = np.arange(Nt)
    a1, a2 = np.exp(2j * np.pi * m * xi1 / Nt), np.exp(2j * np.pi * m * xi2 / Nt)
    val = linear_forms_average([a1, a2], [l1, l2], N, Nt)
    assert val == pytest.approx(two_phase_closed_form(xi1, xi2, l1, l2, N, Nt), abs=1e-12)


@given(st.integers(0, 100))
def test_modulation_absorption(xi):
    # β = (1, -2, 1)·ξ/Ñ satisfies Σβ_j = Σβ_j ℓ_j = 0 for ℓ = (0, 1, 2)
    N, Nt = 8, 53
    rng = np.random.default_rng(xi)
    tabs = [np.exp(2j * np.pi * rng.random(Nt)) for _ in range(3)]
    m = np.arange(Nt)
    mods = [np.exp(2j * np.pi * c * xi * m / Nt) for c in (1, -2, 1)]
    base = linear_forms_average(tabs, [0, 1, 2], N, Nt)
    moved = linear_forms_average([t * w for t, w in zip(tabs, mods)], [0, 1, 2], N, Nt)
    assert moved == pytest.approx(base, abs=1e-9)


def test_permutation_and_conjugation(rng):
    N, Nt = 6, 53
    tabs = [np.exp(2j * np.pi * rng.random(Nt)) for _ in range(3)]
    shifts = [0, 1, 3]
    base = linear_forms_average(tabs, shifts, N, Nt)
    perm = linear_forms_average(tabs[::-1], shifts[::-1], N, Nt)
    assert perm == pytest.approx(base, abs=1e-15)
    conj = linear_forms_average([np.conj(t) for t in tabs], shifts, N, Nt)
    assert conj == pytest.approx(np.conj(base), abs=1e-15)


def test_function_tables_are_embedded():
    N = 20
    Nt = next_prime(2 * 3 * N)
    t = tabulate(liouville(), N)
    a = linear_forms_average([t, t], [1, 2], N, Nt)
    b = linear_forms_average([t.embed(Nt)] * 2, [1, 2], N, Nt)
    assert a == b


def test_uniformity_report_ones():
    N, Nt = 20, 127
    rep = uniformity_bound_report([np.ones(Nt)] * 3, [0, 1, 2], N, Nt)
    assert rep.min_norm == pytest.approx(1.0)
    assert rep.lhs == pytest.approx(N / Nt)
    assert rep.implied_c == pytest.approx(N / Nt - 2 / Nt)
    assert rep.lhs <= rep.rhs + 1e-12


def test_uniformity_report_zero_norm():
    Nt = 127
    rep = uniformity_bound_report([np.zeros(Nt)] * 3, [0, 1, 2], 20, Nt)
    assert rep.implied_c is None and rep.rhs is None


# ---------------------------------------------------------------- quadratic phases


def test_quad_phase_zero():
    assert quad_phase_correlation(np.zeros(101), 0.3, 50) == 0


def test_quad_phase_cancellation():
    N, Nt, alpha = 50, 101, 0.123
    n = np.arange(Nt)
    fun = np.where((n >= 1) & (n <= N), np.exp(-2j * np.pi * (n * n * alpha % 1)), 0)
    # the average runs over n in [N], where the phases cancel exactly
    assert quad_phase_correlation(fun, alpha, N) == pytest.approx(1.0)
    with pytest.raises(InvalidArgument):
        quad_phase_correlation(fun, alpha, 101)


def test_liouville_uniform_part_quadratic_phase():
    N = 4096
    Nt = next_prime(2 * N)
    d = decompose(tabulate(liouville(), N), structured_kernel(KernelParams(Nt, 1, 1)))
    assert quad_phase_correlation(d.fun, math.sqrt(2), N) < 0.05
    val, arg = quad_phase_scan(d.fun, N, np.linspace(0, 1, 11))
    assert 0 <= val and 0 <= arg <= 1
