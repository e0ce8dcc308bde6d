import math

import numpy as np
import pytest

import lggm
import lggm.spin as spin
from lggm.ggm import ALL_CUTS, MaxCutSize

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

FAST_LANCZOS = spin.LanczosSettings(seed=1)


def _site_op(n, i, op):
    m = np.eye(1, dtype=complex)
    for q in range(1, n + 1):
        m = np.kron(m, op if q == i else np.eye(2))
    return m


def dense_hamiltonian(spec: spin.SpinModelSpec) -> np.ndarray:
    n = spec.n_sites
    model = spec.model
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(1, n + 1):
        j = i % n + 1
        if isinstance(model, spin.Ising):
            h += model.coupling * _site_op(n, i, SX) @ _site_op(n, j, SX)
            h += model.field * _site_op(n, i, SZ)
        else:
            h += model.coupling * (
                _site_op(n, i, SX) @ _site_op(n, j, SX)
                + _site_op(n, i, SY) @ _site_op(n, j, SY)
                - model.anisotropy * _site_op(n, i, SZ) @ _site_op(n, j, SZ)
            )
            h += model.field * _site_op(n, i, SZ)
    return h


def test_ising_two_site_example():
    spec = spin.SpinModelSpec(spin.Ising(1.0, 1.0), 2)
    v = np.zeros(4, dtype=complex)
    v[0] = 1.0  # |00>
    out = spin.apply_hamiltonian(spec, v)
    # the periodic pair carries two bonds: 2J|11> + 2h|00>
    assert np.allclose(out, [2.0, 0, 0, 2.0])


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_matvec_matches_dense(n):
    rng = np.random.default_rng(n)
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    for spec in (
        spin.SpinModelSpec(spin.Ising(1.3, 0.8), n),
        spin.SpinModelSpec(spin.XXZ(1.0, 0.5, 0.4), n),
        spin.SpinModelSpec(spin.XXZ(0.7, -1.2, 0.0), n),
    ):
        dense = dense_hamiltonian(spec)
        assert np.abs(spin.apply_hamiltonian(spec, v) - dense @ v).max() < 1e-12


def test_xxz_conserves_sz_sector():
    n = 6
    spec = spin.SpinModelSpec(spin.XXZ(1.0, 0.5, 0.3), n)
    idx = spin._sector_indices(n, 2)
    v = np.zeros(2**n, dtype=complex)
    v[idx] = np.random.default_rng(0).standard_normal(idx.size)
    out = spin.apply_hamiltonian(spec, v)
    outside = np.delete(out, idx)
    assert np.abs(outside).max() < 1e-14


@pytest.mark.parametrize("n", [8, 10])
def test_ground_state_matches_dense(n):
    for spec in (
        spin.SpinModelSpec(spin.Ising(1.0, 1.0), n),
        spin.SpinModelSpec(spin.XXZ(1.0, 0.5, 0.0), n),
    ):
        gs = spin.ground_state(spec, FAST_LANCZOS)
        dense = np.linalg.eigvalsh(dense_hamiltonian(spec))
        assert abs(gs.energy - dense[0]) < 1e-9
        assert gs.residual < 1e-10


def test_ground_state_deterministic():
    spec = spin.SpinModelSpec(spin.Ising(0.5, 1.0), 6)
    a = spin.ground_state(spec, FAST_LANCZOS)
    b = spin.ground_state(spec, FAST_LANCZOS)
    assert a.energy == b.energy
    assert np.array_equal(a.state.amplitudes, b.state.amplitudes)


def test_paramagnetic_limit_is_product():
    spec = spin.SpinModelSpec(spin.Ising(0.01, 1.0), 8)
    gs = spin.ground_state(spec, FAST_LANCZOS)
    assert lggm.ggm(gs.state, MaxCutSize(2)).value < 1e-3


def test_lanczos_nonconvergence_raises():
    spec = spin.SpinModelSpec(spin.Ising(1.0, 1.0), 8)
    with pytest.raises(spin.LanczosConvergenceError):
        spin.ground_state(spec, spin.LanczosSettings(max_iterations=3))


def test_sector_restriction_consistent():
    spec = spin.SpinModelSpec(spin.XXZ(1.0, 0.5, 0.2), 8)
    full = spin.ground_state(spec, FAST_LANCZOS)
    by_sector = min(
        spin.ground_state(spec, FAST_LANCZOS, sz_sector=b).energy
        for b in range(9)
    )
    assert abs(full.energy - by_sector) < 1e-9
    with pytest.raises(ValueError):
        spin.ground_state(spin.SpinModelSpec(spin.Ising(1, 1), 4),
                          FAST_LANCZOS, sz_sector=1)


def test_xxz_ground_state_single_sector():
    spec = spin.SpinModelSpec(spin.XXZ(1.0, 0.5, 0.4), 8)
    gs = spin.ground_state(spec, FAST_LANCZOS)
    weights = spin.sz_sector_weights(gs.state)
    assert weights.max() > 1.0 - 1e-10  # all weight in one magnetization block


def test_ggm_maxcut2_matches_allcuts_on_ground_states():
    for spec in (
        spin.SpinModelSpec(spin.Ising(0.6, 1.0), 8),
        spin.SpinModelSpec(spin.Ising(1.4, 1.0), 10),
        spin.SpinModelSpec(spin.XXZ(1.0, 0.5, 0.2), 8),
    ):
        gs = spin.ground_state(spec, FAST_LANCZOS)
        full = lggm.ggm(gs.state, ALL_CUTS).value
        small = lggm.ggm(gs.state, MaxCutSize(2)).value
        assert abs(full - small) < 1e-6


def test_ising_ggm_monotone_in_ordered_side():
    grid = np.round(np.arange(0.2, 0.8001, 0.1), 10)
    res = spin.sweep(spin.SpinModelSpec(spin.Ising(1.0, 1.0), 8),
                     "lambda", grid, measures=("G",), n_jobs=1)
    g = res.series["G"]
    assert np.all(np.diff(g) > 0)


def test_sweep_validation():
    spec = spin.SpinModelSpec(spin.Ising(1.0, 1.0), 4)
    with pytest.raises(ValueError):
        spin.sweep(spec, "lambda", [])
    with pytest.raises(ValueError):
        spin.sweep(spec, "lambda", [0.5, 0.4])
    with pytest.raises(ValueError):
        spin.sweep(spec, "delta", [0.1, 0.2])
    with pytest.raises(ValueError):
        spin.sweep(spin.SpinModelSpec(spin.XXZ(1, 0.5, 0), 5), "delta",
                   [0.1, 0.2])


def test_locate_extremum_synthetic():
    grid = np.linspace(0, 2, 21)
    kink = np.abs(grid - 1.0)
    res = spin.SweepResult(
        parameter="lambda", grid=grid, energies=np.zeros(21),
        series={"EL1": kink, "G": grid**2, "FLAT": np.ones(21)},
        derivatives={k: (v[2:] - v[:-2]) / (grid[2:] - grid[:-2])
                     for k, v in (("EL1", kink), ("G", grid**2),
                                  ("FLAT", np.ones(21)))},
        sectors=np.zeros(21, dtype=int),
    )
    where, sharp = spin.locate_extremum(res, "EL1", "cusp")
    assert abs(where - 1.0) < 1e-12 and abs(sharp - 2.0) < 1e-12
    where, _ = spin.locate_extremum(res, "EL1", "min")
    assert abs(where - 1.0) < 1e-12
    with pytest.raises(ValueError):
        spin.locate_extremum(res, "FLAT", "max")
    with pytest.raises(ValueError):
        spin.locate_extremum(res, "EL1", "saddle")
    with pytest.raises(ValueError):
        spin.locate_extremum(res, "nope", "max")


def test_sweep_warm_start_runs_parallel_chains():
    grid = np.round(np.arange(0.4, 1.6001, 0.1), 10)  # spans two chains
    res = spin.sweep(spin.SpinModelSpec(spin.Ising(1.0, 1.0), 6),
                     "lambda", grid, measures=("G", "EL1"), n_jobs=2)
    assert res.series["EL1"].size == grid.size
    assert np.all(np.diff(res.series["EL1"]) > -1e-9)


def test_model_validation():
    with pytest.raises(ValueError):
        spin.Ising(-1.0, 1.0)
    with pytest.raises(ValueError):
        spin.SpinModelSpec(spin.Ising(1, 1), 4, boundary="open")
