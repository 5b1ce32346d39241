import math

import numpy as np
import pytest

from hofa.arith import dirichlet, liouville, moebius, principal, standard_family, tabulate_values
from hofa.errors import InsufficientRange, InvalidArgument
from hofa.katai import (constant_h, divisible_mask, katai_battery, katai_zd_sums,
                        mult_correlation_sup, pair_correlations, tk_statistics)
from hofa.quadfield import QuadInt, divides, norm_form, points_up_to_norm, prime_elements


def test_constant_signal_pairs():
    rep = pair_correlations(np.ones(400), 10)
    assert set(rep.entries) == {(2, 3), (2, 5), (2, 7), (3, 5), (3, 7), (5, 7)}
    assert all(v == pytest.approx(1.0) for v in rep.entries.values())


def test_pair_entry_direct():
    rng = np.random.default_rng(3)
    a = np.exp(2j * np.pi * rng.random(500))
    rep = pair_correlations(a, 8)
    n = np.arange(1, 500 // 7 + 1)
    assert rep.entries[(3, 7)] == pytest.approx(abs(np.mean(a[3 * n - 1] * np.conj(a[7 * n - 1]))))


def test_rational_phase_entry():
    n = np.arange(1, 2001)
    rep = pair_correlations(np.exp(2j * np.pi * n / 3), 10)
    assert rep.entries[(2, 5)] == pytest.approx(1.0)


def test_irrational_phase_entries():
    n = np.arange(1, 100_001)
    rep = pair_correlations(np.exp(2j * np.pi * n * (math.sqrt(2) - 1)), 10)
    assert rep.max_entry <= 0.05


def test_pair_errors():
    with pytest.raises(InsufficientRange):
        pair_correlations(np.ones(50), 10)
    with pytest.raises(InvalidArgument):
        pair_correlations(np.ones(50), 2)


def test_sup_trivial_cases(sieve):
    assert mult_correlation_sup(np.ones(100), [principal()], sieve)[0] == pytest.approx(1.0)
    lam = tabulate_values(liouville(), 1000, sieve)[1:]
    assert mult_correlation_sup(lam, [liouville()], sieve)[0] == pytest.approx(1.0)
    with pytest.raises(InvalidArgument):
        mult_correlation_sup(lam, [], sieve)


def test_sup_irrational_phase(sieve):
    n = np.arange(1, 100_001)
    sup, per = mult_correlation_sup(np.exp(2j * np.pi * n * math.sqrt(2)), standard_family(), sieve)
    assert sup < 0.05
    assert set(per) == {"liouville", "moebius", "principal", "chi_3_1"}


def test_divisible_mask_matches_ring_division():
    d = 1
    pts = points_up_to_norm(d, 200)
    for alpha in prime_elements(d, 30):
        mask = divisible_mask(alpha, d, pts[:, 0], pts[:, 1])
        ref = [divides(alpha.z, QuadInt(int(m), int(n), d))[0] for m, n in pts]
        assert mask.tolist() == ref


def test_tk_small():
    P = [p for p in prime_elements(1, 5) if p.norm == 5][:1]
    st = tk_statistics(1, P, 30)
    assert st.A == pytest.approx(1 / 5)
    # z = 5 is divisible, z = 1 is not
    idx5 = np.flatnonzero((st.points[:, 0] == 5) & (st.points[:, 1] == 0))[0]
    idx1 = np.flatnonzero((st.points[:, 0] == 1) & (st.points[:, 1] == 0))[0]
    assert st.omega[idx5] == 1 and st.omega[idx1] == 0
    with pytest.raises(InvalidArgument):
        tk_statistics(1, [], 10)


def test_omega_bounded_by_ideal_count():
    d = 1
    P = prime_elements(d, 60)
    split = {p.norm for p in P if not p.ramified}
    st = tk_statistics(d, P, 3000)
    for (m, n), w in zip(st.points, st.omega):
        N = int(norm_form(d, int(m), int(n)))
        primes = [q for q in range(2, N + 1) if N % q == 0 and all(q % r for r in range(2, math.isqrt(q) + 1))]
        assert w <= sum(2 if q in split else 1 for q in primes)


def test_tk_shape():
    P = prime_elements(1, 100)
    st = tk_statistics(1, P, 10_000)
    assert st.mean_deviation <= 3 * math.sqrt(st.A) + 0.5


def test_zd_sums_trivial():
    P = prime_elements(1, 30)
    s = katai_zd_sums(principal(), 1, constant_h, P[:1], 500, 1)
    # f(0) = 0 under the even extension, so S counts the nonzero lattice points
    assert s.S == len(points_up_to_norm(1, 500)) - 1
    assert s.C == 0.0


def test_zd_pair_modes():
    P = [p for p in prime_elements(1, 30) if not p.ramified][:3]
    h = lambda m, n: np.exp(2j * np.pi * 0.1 * m)
    vals = {mode: katai_zd_sums(liouville(), 1, h, P, 400, 1, pair=mode).C for mode in ("h", "f", "fh")}
    assert all(v >= 0 for v in vals.values())
    # pair sums over h ≡ 1 reduce to lattice-point counts
    c1 = katai_zd_sums(liouville(), 1, constant_h, P, 400, 1, pair="h").C
    ref = 0
    for a in P:
        for b in P:
            if a is not b:
                ref += len(points_up_to_norm(1, min(400 // a.norm, 400 // b.norm))) - 1
    assert c1 == ref
    with pytest.raises(InvalidArgument):
        katai_zd_sums(liouville(), 1, h, P, 400, 1, pair="x")


def test_zd_bound_shape():
    P = prime_elements(1, 100)
    s = katai_zd_sums(liouville(), 1, constant_h, P, 10_000, 1)
    assert abs(s.S / s.x) ** 2 <= 10 * s.bound_terms()


def test_battery_rows(sieve):
    n = np.arange(1, 5001)
    rows = katai_battery({"const": np.ones(5000), "sqrt2": np.exp(2j * np.pi * n * math.sqrt(2))},
                         [liouville(), moebius(), dirichlet(3, 1)], K=20)
    assert [r["signal"] for r in rows] == ["const", "sqrt2"]
    assert rows[0]["maxEntry"] == pytest.approx(1.0)
    assert not rows[0]["finding"]
