import math

import numpy as np
import pytest

import lggm
import lggm.oracle as oracle
from lggm.localize import OptimizerSettings

FAST = OptimizerSettings(grid_points_per_angle=8)


def test_gghz_lggm():
    assert oracle.gghz_lggm(0.5).value == 0.5
    assert oracle.gghz_lggm(0.0).value == 0.0
    assert oracle.gghz_lggm(0.3).value == 0.3
    with pytest.raises(ValueError):
        oracle.gghz_lggm(0.7)


def test_gw_table_min_rule():
    assert oracle.gw_lggm_table((0.5, 0.3, 0.2), 1).value == 0.2
    for r in (1, 2, 3):
        assert abs(oracle.gw_lggm_table((1 / 3,) * 3, r).value - 1 / 3) < 1e-12
    assert oracle.gw_lggm_table((0.2, 0.5, 0.3), 3).value == 0.2
    with pytest.raises(ValueError):
        oracle.gw_lggm_table((0.5, 0.5, 0.0), 1)
    with pytest.raises(ValueError):
        oracle.gw_lggm_table((0.5, 0.3, 0.3), 1)  # does not sum to 1


def test_gw_table_matches_numeric():
    rng = np.random.default_rng(17)
    for _ in range(10):
        a_sq = rng.dirichlet((2.0, 2.0, 2.0))
        if a_sq.min() < 5e-3:
            continue
        s = lggm.build(lggm.GW(tuple(np.sqrt(a_sq))))
        for r in (1, 2, 3):
            num = lggm.lggm(s, (r,), settings=FAST).value
            assert abs(num - oracle.gw_lggm_table(tuple(a_sq), r).value) < 1e-4


def test_gw_table_lower_bounded_by_min():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a_sq = rng.dirichlet((1.0, 1.0, 1.0)) + 1e-6
        a_sq = a_sq / a_sq.sum()
        for r in (1, 2, 3):
            assert oracle.gw_lggm_table(tuple(a_sq), r).value >= a_sq.min() - 1e-12


def test_dicke_ggm():
    assert abs(oracle.dicke_ggm(6, 3).value - 0.4) < 1e-12
    assert oracle.dicke_ggm(5, 0).value == 0.0
    assert abs(oracle.dicke_ggm(7, 3).value - 3 / 7) < 1e-12
    # excitation-hole symmetry
    assert oracle.dicke_ggm(7, 4).value == oracle.dicke_ggm(7, 3).value


def test_dicke_lggm():
    assert abs(oracle.dicke_lggm(8, 4).value - 3 / 7) < 1e-12
    assert abs(oracle.dicke_lggm(3, 1).value - 1 / 3) < 1e-12
    expect = 8 / 18 - 10 / (36 * 7)
    assert abs(oracle.dicke_lggm(9, 4).value - expect) < 1e-12
    assert oracle.dicke_lggm(9, 5).value == oracle.dicke_lggm(9, 4).value


def test_dicke_lggm_bounded_by_ggm():
    for n in range(3, 11):
        for k in range(0, n + 1):
            lo = oracle.dicke_lggm(n, k).value
            hi = oracle.dicke_ggm(n, k).value
            assert lo <= hi + 1e-12
            strict = n % 2 == 1 and n > 3 and k in ((n - 1) // 2, (n + 1) // 2)
            assert (lo < hi - 1e-9) == strict


def test_fourq_table():
    assert oracle.fourq_table(7, 2).value == 0.25
    assert oracle.fourq_table(9, 3).value == 0.0
    assert oracle.fourq_table(8, (3, 4)).value == 0.25
    assert oracle.fourq_table(8, (1, 4)).value == 0.5
    assert oracle.fourq_ggm(9).value == 0.0
    with pytest.raises(ValueError):
        oracle.fourq_table(6, 1)
    with pytest.raises(ValueError):
        oracle.fourq_table(8, (1, 5))


def test_wclass_fwc_theta_zero_closed_form():
    a = (0.2, 0.3, 0.4, 0.1)
    # at theta = 0 the branch weights are p1 = a1+a2+a4 and p2 = a3
    p1, p2 = a[0] + a[1] + a[3], a[2]
    expect = math.sqrt(p1 * p1 - 4 * a[0] * a[1]) + p2
    assert abs(oracle.wclass_fwc(a, 0.0, 0.0) - expect) < 1e-12


def test_wclass_fwc_reduces_to_gw_when_a4_zero():
    a = (0.5, 0.3, 0.2, 0.0)
    for theta in (0.3, 1.1, 2.0):
        vals = [oracle.wclass_fwc(a, theta, phi) for phi in (0.0, 1.0, 2.5)]
        assert np.ptp(vals) < 1e-12  # phi-independent without the cross term


def test_wclass_scalar_path_matches_full_numeric():
    rng = np.random.default_rng(23)
    for _ in range(10):
        a = tuple(rng.dirichlet(np.ones(4)))
        full = lggm.lggm(lggm.build(lggm.WClass(a)), (1,), settings=FAST).value
        scalar = oracle.wclass_lggm1(a, settings=FAST).value
        assert abs(full - scalar) < 1e-6


def test_dicke_rdm_theta_zero_diagonal_in_dicke_basis():
    rho = oracle.dicke_post_measurement_rdm(6, 2, 2, 0.0, 0.0, 0)
    basis = np.stack([lggm.build(lggm.Dicke(2, i)).amplitudes for i in range(3)])
    in_dicke = basis.conj() @ rho.entries @ basis.T
    off = in_dicke - np.diag(np.diag(in_dicke))
    assert np.abs(off).max() < 1e-14


def test_dicke_rdm_matches_pipeline():
    rng = np.random.default_rng(8)
    for _ in range(25):
        n_tot = int(rng.integers(4, 9))
        k = int(rng.integers(0, n_tot + 1))
        cap = (n_tot - 2) // 2 if n_tot % 2 == 0 else (n_tot - 1) // 2
        n_sub = int(rng.integers(1, cap + 1))
        theta = rng.uniform(0, math.pi)
        phi = rng.uniform(0, 2 * math.pi)
        out = int(rng.integers(0, 2))
        d = lggm.build(lggm.Dicke(n_tot, k))
        p, coll = lggm.project_and_trace(d, [1], [(theta, phi)], out)
        if p < 1e-9:
            with pytest.raises(ValueError):
                oracle.dicke_post_measurement_rdm(n_tot, k, n_sub, theta, phi, out)
            continue
        want = lggm.reduced_density(coll, list(range(1, n_sub + 1))).entries
        got = oracle.dicke_post_measurement_rdm(n_tot, k, n_sub, theta, phi, out)
        assert np.abs(got.entries - want).max() < 1e-10


def test_dicke_rdm_trace_one():
    rng = np.random.default_rng(9)
    for _ in range(20):
        theta = rng.uniform(0.1, math.pi - 0.1)
        phi = rng.uniform(0, 2 * math.pi)
        rho = oracle.dicke_post_measurement_rdm(7, 3, 2, theta, phi, 1)
        assert abs(np.trace(rho.entries).real - 1.0) < 1e-12


def test_dicke_rdm_parameter_validation():
    with pytest.raises(ValueError):
        oracle.dicke_post_measurement_rdm(6, 2, 3, 0.1, 0.0, 0)  # n too large
    with pytest.raises(ValueError):
        oracle.dicke_post_measurement_rdm(6, 7, 1, 0.1, 0.0, 0)
    with pytest.raises(ValueError):
        oracle.dicke_post_measurement_rdm(6, 2, 1, 0.1, 0.0, 2)
