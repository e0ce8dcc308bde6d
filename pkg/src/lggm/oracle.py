"""Closed-form GGM/LGGM values for the named state families.

These expressions serve as ground truth for the numerical pipeline and
are exposed for cross-checking. Domain notes travel with each value.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .localize import DEFAULT_SETTINGS, OptimizerSettings, maximize_over_angles
from .qstate import DensityMatrix


@dataclass(frozen=True)
class AnalyticValue:
    value: float
    formula_id: str
    validity: str = ""


def gghz_lggm(a2_sq: float) -> AnalyticValue:
    """LGGM of the generalized GHZ state with minor branch weight |a2|^2.

    Coincides with the GGM: measurement cannot raise the entanglement of
    a two-branch superposition.
    """
    if not 0.0 <= a2_sq <= 0.5 + 1e-12:
        raise ValueError("|a2|^2 must lie in [0, 1/2] (reorder the branches)")
    return AnalyticValue(min(a2_sq, 0.5), "gghz-lggm", "|a1|^2 >= 1/2 >= |a2|^2")


def gw_lggm_table(a_sq, r: int) -> AnalyticValue:
    """LGGM of a three-qubit gW state measured at qubit ``r``.

    Equals the smaller of the two squared coefficients not attached to
    the measured qubit (coefficient i excites qubit i).
    """
    a_sq = tuple(float(x) for x in a_sq)
    if len(a_sq) != 3:
        raise ValueError("expects three squared coefficients")
    if r not in (1, 2, 3):
        raise ValueError("measured qubit must be 1, 2 or 3")
    if abs(sum(a_sq) - 1.0) > 1e-9:
        raise ValueError("squared coefficients must sum to 1")
    if min(a_sq) <= 1e-12:
        raise ValueError("degenerate gW state: a zero coefficient drops a qubit")
    others = [a_sq[i] for i in range(3) if i != r - 1]
    return AnalyticValue(min(others), "gw-min-rule",
                         "computational-basis optimum of the gW family")


def dicke_ggm(n_qubits: int, k: int) -> AnalyticValue:
    """GGM of the Dicke state with k excitations (N > 2)."""
    if n_qubits <= 2:
        raise ValueError("Dicke GGM formula needs N > 2")
    if not 0 <= k <= n_qubits:
        raise ValueError(f"k={k} outside 0..{n_qubits}")
    if 2 * k > n_qubits:
        k = n_qubits - k  # excitation-hole symmetry
    if 2 * k == n_qubits:
        value = (n_qubits - 2) / (2.0 * (n_qubits - 1))
    else:
        value = k / n_qubits
    return AnalyticValue(value, "dicke-ggm")


def dicke_lggm(n_qubits: int, k: int) -> AnalyticValue:
    """Single-qubit-measurement LGGM of the Dicke state."""
    if n_qubits < 3:
        raise ValueError("Dicke LGGM formula needs N >= 3")
    if not 0 <= k <= n_qubits:
        raise ValueError(f"k={k} outside 0..{n_qubits}")
    n = n_qubits
    if 2 * k > n:
        k = n - k  # hole symmetry covers the k = (N+1)/2 branch
    if n % 2 == 0:
        return AnalyticValue(dicke_ggm(n, k).value, "dicke-lggm", "even N")
    if n == 3 and k in (1, 2):
        return AnalyticValue(1.0 / 3.0, "dicke-lggm", "N = 3")
    if 2 * k == n - 1:
        value = (n - 1) / (2.0 * n) - (n + 1) / (4.0 * n * (n - 2))
        return AnalyticValue(value, "dicke-lggm", "odd N, k = (N-1)/2, N > 3")
    return AnalyticValue(k / n, "dicke-lggm", "odd N, k < (N-1)/2")


# Printed G and E_L values for the parameterless four-qubit classes 7..9.
_FOURQ_GGM = {7: 0.25, 8: 0.25, 9: 0.0}
_FOURQ_SINGLE = {
    7: {1: 0.25, 2: 0.25, 3: 0.25, 4: 0.25},
    8: {1: 0.5, 2: 0.25, 3: 0.25, 4: 0.25},
    9: {1: 0.5, 2: 0.0, 3: 0.0, 4: 0.0},
}
_FOURQ_PAIR = {
    7: {pair: 0.25 for pair in
        ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))},
    8: {(1, 2): 0.5, (1, 3): 0.5, (1, 4): 0.5,
        (2, 3): 0.5, (2, 4): 0.5, (3, 4): 0.25},
    9: {(1, 2): 0.5, (1, 3): 0.5, (1, 4): 0.5,
        (2, 3): 0.5, (2, 4): 0.5, (3, 4): 0.0},
}


def fourq_ggm(class_index: int) -> AnalyticValue:
    if class_index not in _FOURQ_GGM:
        raise ValueError("tabulated GGM exists only for classes 7, 8, 9")
    return AnalyticValue(_FOURQ_GGM[class_index], "fourq-table")


def fourq_table(class_index: int, positions) -> AnalyticValue:
    """Tabulated LGGM of classes 7..9 for a single qubit or a pair."""
    if class_index not in _FOURQ_GGM:
        raise ValueError("tabulated values exist only for classes 7, 8, 9")
    if isinstance(positions, int):
        positions = (positions,)
    positions = tuple(sorted(int(p) for p in positions))
    if len(positions) == 1:
        table = _FOURQ_SINGLE[class_index]
    elif len(positions) == 2:
        table = _FOURQ_PAIR[class_index]
    else:
        raise ValueError("positions must name one qubit or a pair")
    key = positions if len(positions) == 2 else positions[0]
    if key not in table:
        raise ValueError(f"positions {positions} outside 1..4")
    return AnalyticValue(table[key], "fourq-table")


# --------------------------------------------------------------------------
# W-class scalar objective
# --------------------------------------------------------------------------

def _ql(theta: float):
    c2 = math.cos(0.5 * theta) ** 2
    s2 = math.sin(0.5 * theta) ** 2
    return (c2, s2), (s2, c2)  # (q^l_1), (q^l_2) for l = 1, 2


def wclass_fwc(a, theta: float, phi: float) -> float:
    """The scalar objective whose minimum gives the W-class LGGM at qubit 1.

    ``a = (a1, a2, a3, a4)`` are the probabilities of the W-class
    parametrization; E_L^1 = (1 - min f_wc) / 2.
    """
    a1, a2, a3, a4 = (float(x) for x in a)
    q1, q2 = _ql(theta)
    u = (math.cos(0.5 * theta) ** 4, math.sin(0.5 * theta) ** 4)
    cross = math.sqrt(max(a3 * a4, 0.0)) * math.sin(theta) * math.cos(phi)
    total = 0.0
    for l in range(2):
        p = (a1 + a2 + a4) * q1[l] + a3 * q2[l] - (-1) ** (l + 1) * cross
        total += math.sqrt(max(p * p - 4.0 * a1 * a2 * u[l], 0.0))
    return total


def wclass_lggm1(a, settings: Optional[OptimizerSettings] = None) -> AnalyticValue:
    """W-class E_L^1 from the scalar objective, via the shared optimizer."""
    settings = settings or DEFAULT_SETTINGS

    def objective(angles: np.ndarray) -> float:
        return 0.5 * (1.0 - wclass_fwc(a, angles[0], angles[1]))

    value, _, _ = maximize_over_angles(objective, 1, settings)
    return AnalyticValue(value, "wclass-fwc", "qubit 1 measured")


# --------------------------------------------------------------------------
# Dicke post-measurement reduced density matrices
# --------------------------------------------------------------------------

def _dicke_basis(n: int) -> np.ndarray:
    from .qstate import _dicke_vector
    return np.stack([_dicke_vector(n, i) for i in range(n + 1)])


def dicke_post_measurement_rdm(n_qubits: int, k: int, n_sub: int,
                               theta: float, phi: float,
                               outcome: int) -> DensityMatrix:
    """n-qubit RDM of the post-measurement branch of a Dicke state.

    One qubit of ``|D^N_k>`` is measured at angles (theta, phi);
    ``outcome`` is 0 or 1 (first or second projector). Valid for
    ``1 <= n_sub <= (N-2)/2`` (even N) or ``(N-1)/2`` (odd N). The
    printed coefficient ``F_i`` uses binomial C(N-n-1, k-i) weights; the
    matrix is assembled in the computational basis of the subset.
    """
    N, n = n_qubits, n_sub
    n_cap = (N - 2) // 2 if N % 2 == 0 else (N - 1) // 2
    if not 1 <= n <= n_cap:
        raise ValueError(f"subset size {n} outside 1..{n_cap}")
    if not 0 <= k <= N:
        raise ValueError(f"k={k} outside 0..{N}")
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    comb = math.comb
    q1, q2 = _ql(theta)
    l = outcome
    a_k = comb(N - 1, k) / comb(N, k)
    b_k = comb(N - 1, k - 1) / comb(N, k) if k >= 1 else 0.0
    p = a_k * q1[l] + b_k * q2[l]
    if p < 1e-12:
        raise ValueError("measurement branch has vanishing probability")

    def c(nn, kk):
        return comb(nn, kk) if 0 <= kk <= nn else 0

    basis = _dicke_basis(n)
    dim = 2**n
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(n + 1):
        f_i = comb(n, i) * (c(N - n - 1, k - i) * q1[l]
                            + c(N - n - 1, k - i - 1) * q2[l])
        rho += f_i * np.outer(basis[i], basis[i].conj())
    sign = -((-1) ** (l + 1))  # +1 for the first projector, -1 for the second
    for i in range(n):
        g_i = (0.5 * math.sin(theta) * c(N - n - 1, k - i - 1)
               * math.sqrt(comb(n, i + 1) * comb(n, i)))
        if g_i == 0.0:
            continue
        # phi enters conjugated relative to the projector kets because the
        # collapse applies the bra <xi_l|
        off = np.outer(basis[i + 1], basis[i].conj())
        rho += sign * g_i * (np.exp(1j * phi) * off
                             + np.exp(-1j * phi) * off.conj().T)
    rho /= comb(N, k) * p
    return DensityMatrix(n, rho)
