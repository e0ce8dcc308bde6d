import itertools
import json
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import lggm
from lggm import qstate
from conftest import random_state


def test_gghz_amplitudes():
    s = lggm.build(lggm.GGHZ(1 / math.sqrt(2), 1 / math.sqrt(2), 3))
    expect = np.zeros(8)
    expect[0] = expect[7] = 1 / math.sqrt(2)
    assert np.allclose(s.amplitudes, expect)
    assert s.symmetric


def test_dicke_zero_excitations_is_product():
    s = lggm.build(lggm.Dicke(2, 0))
    assert np.allclose(s.amplitudes, [1, 0, 0, 0])


def test_dicke_4_2_brute_force():
    # enumerate the C(4,2) bit permutations directly
    s = lggm.build(lggm.Dicke(4, 2))
    expect = np.zeros(16)
    for bits in itertools.permutations("0011"):
        expect[int("".join(bits), 2)] = 1 / math.sqrt(6)
    assert np.allclose(s.amplitudes, expect)
    assert np.count_nonzero(s.amplitudes) == 6


def test_unnormalized_input_is_rescaled():
    s = lggm.build(lggm.Raw((3.0, 0.0, 0.0, 4.0)))
    assert np.isclose(np.linalg.norm(s.amplitudes), 1.0)
    assert np.isclose(abs(s.amplitudes[0]), 0.6)


def test_build_is_deterministic():
    a = lggm.build(lggm.Haar(3, 99)).amplitudes
    b = lggm.build(lggm.Haar(3, 99)).amplitudes
    assert np.array_equal(a, b)


def test_haar_requires_two_qubits():
    with pytest.raises(ValueError):
        lggm.haar_random(1, 0)


def test_haar_norm():
    for seed in range(5):
        s = lggm.haar_random(3, seed)
        assert abs(np.linalg.norm(s.amplitudes) - 1.0) < 1e-12


def test_haar_statistic_matches_independent_sampler():
    # mean largest single-qubit RDM eigenvalue, cross-checked against a
    # stdlib-RNG reimplementation with a hand-rolled 2x2 eigenvalue
    n_samples = 10_000

    vals = np.empty(n_samples)
    for i in range(n_samples):
        s = lggm.haar_random(3, i)
        rho = lggm.reduced_density(s, [1]).entries
        vals[i] = lggm.max_eigenvalue(lggm.DensityMatrix(1, rho))

    ref = random.Random(1234)
    ref_vals = np.empty(n_samples)
    for i in range(n_samples):
        z = [complex(ref.gauss(0, 1), ref.gauss(0, 1)) for _ in range(8)]
        norm = math.sqrt(sum(abs(x) ** 2 for x in z))
        z = [x / norm for x in z]
        r00 = sum(abs(z[j]) ** 2 for j in range(4))
        r01 = sum(z[j] * z[j + 4].conjugate() for j in range(4))
        half = 0.5 * (r00 - (1 - r00))
        ref_vals[i] = 0.5 + math.sqrt(half * half + abs(r01) ** 2)

    se = math.sqrt(vals.var() / n_samples + ref_vals.var() / n_samples)
    assert abs(vals.mean() - ref_vals.mean()) < 3 * se


def test_reduced_density_ghz():
    rho = lggm.reduced_density(lggm.ghz(3), [1])
    assert np.allclose(rho.entries, np.diag([0.5, 0.5]))


def test_reduced_density_product_state():
    s = lggm.build(lggm.Raw(tuple(np.eye(8)[0])))
    for subset in ([1], [2], [1, 3]):
        rho = lggm.reduced_density(s, subset)
        assert abs(lggm.max_eigenvalue(rho) - 1.0) < 1e-12


def test_reduced_density_gw_single_qubit():
    # direct 8-amplitude partial trace: eigenvalues {|a_r|^2, 1-|a_r|^2}
    a_sq = (0.5, 0.3, 0.2)
    s = lggm.build(lggm.GW(tuple(np.sqrt(a_sq))))
    amps = s.amplitudes.reshape(2, 4)
    by_hand = amps @ amps.conj().T
    rho = lggm.reduced_density(s, [1])
    assert np.allclose(rho.entries, by_hand, atol=1e-12)
    assert np.allclose(sorted(np.linalg.eigvalsh(rho.entries)), [0.5, 0.5])


def test_reduced_density_rejects_bad_subsets():
    s = lggm.ghz(3)
    for subset in ([], [0], [4], [1, 1]):
        with pytest.raises(ValueError):
            lggm.reduced_density(s, subset)


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        lggm.DensityMatrix(1, np.array([[0.5, 0.1], [0.3, 0.5]]))
    with pytest.raises(ValueError):
        lggm.DensityMatrix(1, np.diag([0.7, 0.7]))


def test_collapse_ghz_computational():
    p, st = lggm.project_and_trace(lggm.ghz(3), [1], [(0.0, 0.0)], 0)
    assert abs(p - 0.5) < 1e-12
    assert np.allclose(st.amplitudes, [1, 0, 0, 0])


def test_collapse_gghz_appendix_formula():
    # p^l = |a1|^2 q^l_1 + |a2|^2 q^l_2 at theta = 0
    s = lggm.build(lggm.GGHZ(math.sqrt(0.7), math.sqrt(0.3), 4))
    p, st = lggm.project_and_trace(s, [1], [(0.0, 0.0)], 1)
    assert abs(p - 0.3) < 1e-12
    expect = np.zeros(8)
    expect[-1] = 1.0
    assert np.allclose(st.amplitudes, expect)


def test_collapse_w3_dense_projector_oracle():
    s = lggm.w_state(3)
    theta, phi = math.pi / 2, 0.0
    xi = [
        np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)]),
        np.array([-math.sin(theta / 2) * np.exp(-1j * phi), math.cos(theta / 2)]),
    ]
    total = 0.0
    for out in (0, 1):
        p, st = lggm.project_and_trace(s, [1], [(theta, phi)], out)
        proj = np.kron(np.outer(xi[out], xi[out].conj()), np.eye(4))
        v = proj @ s.amplitudes
        p_ref = float(np.vdot(v, v).real)
        collapsed_ref = (xi[out].conj() @ v.reshape(2, 4)) / math.sqrt(p_ref)
        assert abs(p - p_ref) < 1e-12
        assert np.allclose(st.amplitudes, collapsed_ref)
        total += p
    assert abs(total - 1.0) < 1e-10


def test_collapse_zero_probability_placeholder():
    s = lggm.build(lggm.Raw(tuple(np.eye(16)[0])))  # |0000>
    p, st = lggm.project_and_trace(s, [1], [(0.0, 0.0)], 1)
    assert p == 0.0
    assert st.placeholder


def test_collapse_rejects_bad_arguments():
    s = lggm.ghz(4)
    with pytest.raises(ValueError):
        lggm.project_and_trace(s, [1, 2, 3], [(0, 0)] * 3, 0)  # leaves 1 qubit
    with pytest.raises(ValueError):
        lggm.project_and_trace(s, [1], [(4.0, 0.0)], 0)  # theta out of range
    with pytest.raises(ValueError):
        lggm.project_and_trace(s, [1], [(0.0, 0.0)], 2)  # outcome out of range


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(3, 6))
def test_collapse_probabilities_sum_to_one(seed, n):
    rng = np.random.default_rng(seed)
    s = lggm.haar_random(n, seed)
    m = int(rng.integers(1, n - 1))
    positions = tuple(sorted(rng.choice(np.arange(1, n + 1), m, replace=False)))
    angles = [(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
              for _ in range(m)]
    total = 0.0
    for out in range(2**m):
        p, st = lggm.project_and_trace(s, positions, angles, out)
        total += p
        if p > 0:
            assert abs(np.linalg.norm(st.amplitudes) - 1.0) < 1e-12
    assert abs(total - 1.0) < 1e-10


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 7))
def test_schmidt_symmetry(seed, n):
    rng = np.random.default_rng(seed)
    s = lggm.haar_random(n, seed)
    size = int(rng.integers(1, n))
    subset = sorted(rng.choice(np.arange(1, n + 1), size, replace=False))
    complement = [q for q in range(1, n + 1) if q not in subset]
    sa = lggm.schmidt_spectrum(s, subset)
    sb = lggm.schmidt_spectrum(s, complement)
    k = min(sa.size, sb.size)
    assert np.allclose(sa[:k], sb[:k], atol=1e-10)
    assert abs(sa.sum() - 1.0) < 1e-10


def test_wclass_validation():
    with pytest.raises(ValueError):
        lggm.build(lggm.WClass((0.5, 0.4, 0.3, -0.2)))
    s = lggm.build(lggm.WClass((0.2, 0.3, 0.4, 0.1)))
    assert abs(s.amplitudes[0b001] - math.sqrt(0.2)) < 1e-12
    assert abs(s.amplitudes[0b100] - math.sqrt(0.4)) < 1e-12


def test_ghzclass_normalization():
    spec = lggm.GHZClass(0.7, (0.9, 1.1, 0.6), 0.4)
    s = lggm.build(spec)
    k_inv = 1 + 2 * math.cos(0.7) * math.sin(0.7) * math.cos(0.9) \
        * math.cos(1.1) * math.cos(0.6) * math.cos(0.4)
    # amplitude of |000> is sqrt(K) (cos d + e^{i mu} sin d prod cos g)
    expect = (math.cos(0.7) + np.exp(0.4j) * math.sin(0.7)
              * math.cos(0.9) * math.cos(1.1) * math.cos(0.6)) / math.sqrt(k_inv)
    assert abs(s.amplitudes[0] - expect) < 1e-12


def test_fourq_class_index_validation():
    with pytest.raises(ValueError):
        lggm.build(lggm.FourQubitClass(10))
    with pytest.raises(ValueError):
        lggm.build(lggm.FourQubitClass(1, (1.0,)))  # wrong parameter count


def test_appendix_d_examples_normalized():
    for which, n in ((1, 4), (2, 5)):
        s = lggm.build(lggm.AppendixDExample(which, 0.3))
        assert s.n_qubits == n
        assert abs(np.linalg.norm(s.amplitudes) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        lggm.build(lggm.AppendixDExample(1, 0.6))


def test_dicke_k_range():
    with pytest.raises(ValueError):
        lggm.build(lggm.Dicke(4, 5))


def test_dimension_cap(monkeypatch):
    monkeypatch.setattr(qstate, "MAX_QUBITS", 5)
    with pytest.raises(lggm.DimensionCapError):
        lggm.haar_random(6, 0)


def test_state_json_roundtrip(tmp_path):
    s = lggm.haar_random(3, 5)
    path = tmp_path / "state.json"
    lggm.save_state_json(s, str(path))
    loaded = lggm.load_state_json(str(path))
    assert loaded.n_qubits == 3
    assert np.allclose(loaded.amplitudes, s.amplitudes)
    # qubit 1 is the most significant bit: |01> sits at index 1
    two = lggm.build(lggm.Raw((0.0, 1.0, 0.0, 0.0)))
    lggm.save_state_json(two, str(path))
    payload = json.loads(path.read_text())
    assert payload["amplitudes"][1] == [1.0, 0.0]


def test_state_json_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n_qubits": 2, "amplitudes": [[1, 0]]}')
    with pytest.raises(ValueError):
        lggm.load_state_json(str(path))


def test_amplitudes_are_immutable():
    s = lggm.ghz(3)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1.0
