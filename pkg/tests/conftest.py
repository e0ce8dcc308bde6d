import numpy as np
import pytest

import lggm


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def random_state(n_qubits: int, seed: int) -> lggm.PureState:
    return lggm.haar_random(n_qubits, seed)


def haar_unitary_2x2(rng) -> np.ndarray:
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_gw(n_qubits: int, rng) -> lggm.PureState:
    z = rng.standard_normal(n_qubits) + 1j * rng.standard_normal(n_qubits)
    return lggm.build(lggm.GW(tuple(z / np.linalg.norm(z))))


def apply_local_unitaries(state, unitaries):
    from lggm.qstate import apply_single_qubit_unitary
    for pos, u in enumerate(unitaries, start=1):
        state = apply_single_qubit_unitary(state, pos, u)
    return state
