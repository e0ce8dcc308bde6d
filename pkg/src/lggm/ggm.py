"""Generalized geometric measure: 1 minus the largest squared Schmidt
coefficient over bipartitions of a pure state."""

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from . import _kernels
from .qstate import DensityMatrix, PureState, reduced_density

#: Cuts whose largest eigenvalue lies within this of the maximum count as ties.
TIE_ATOL = 1e-10

#: Largest cut size the compiled kernels diagonalize inline; bigger cuts are
#: routed through LAPACK.
KERNEL_CUT_CAP = 8


@dataclass(frozen=True)
class AllCuts:
    """Every subset of size 1..floor(N/2)."""


@dataclass(frozen=True)
class MaxCutSize:
    """Subsets of size 1..min(n_max, floor(N/2))."""
    n_max: int


@dataclass(frozen=True)
class ExplicitCuts:
    cuts: tuple


CutPolicy = Union[AllCuts, MaxCutSize, ExplicitCuts]

ALL_CUTS = AllCuts()


@dataclass(frozen=True)
class GgmValue:
    value: float
    max_schmidt_sq: float
    argmax_cut: tuple
    tied_cuts: tuple


def cut_subsets(policy: CutPolicy, n_qubits: int) -> list:
    """Enumerate the cuts a policy selects, size ascending then lexicographic.

    The enumeration order fixes tie-breaking: the canonical achieving cut
    is the first one within ``TIE_ATOL`` of the maximum eigenvalue.
    """
    half = n_qubits // 2
    if isinstance(policy, AllCuts):
        sizes = range(1, half + 1)
    elif isinstance(policy, MaxCutSize):
        if policy.n_max < 1:
            raise ValueError("MaxCutSize needs n_max >= 1")
        sizes = range(1, min(policy.n_max, half) + 1)
    elif isinstance(policy, ExplicitCuts):
        cuts = [tuple(sorted(int(q) for q in c)) for c in policy.cuts]
        if not cuts:
            raise ValueError("ExplicitCuts must list at least one cut")
        for cut in cuts:
            if not cut:
                raise ValueError("cuts must be nonempty")
            if len(set(cut)) != len(cut):
                raise ValueError(f"cut {cut} repeats a qubit")
            if cut[0] < 1 or cut[-1] > n_qubits:
                raise ValueError(f"cut {cut} outside 1..{n_qubits}")
            if len(cut) > half:
                raise ValueError(
                    f"cut {cut} larger than floor(N/2) = {half}"
                )
        return sorted(set(cuts), key=lambda c: (len(c), c))
    else:
        raise TypeError(f"unknown cut policy {type(policy).__name__}")
    out = []
    for size in sizes:
        out.extend(combinations(range(1, n_qubits + 1), size))
    return out


def max_eigenvalue(rho: DensityMatrix) -> float:
    """Largest eigenvalue of a Hermitian density matrix."""
    return float(np.linalg.eigvalsh(rho.entries)[-1])


def schmidt_spectrum(state: PureState, subset: Sequence[int]) -> np.ndarray:
    """Eigenvalues of the reduced density matrix across a cut, descending."""
    rho = reduced_density(state, subset)
    vals = np.linalg.eigvalsh(rho.entries)[::-1].real
    return np.clip(vals, 0.0, None)


def _lambda_max_per_cut(state: PureState, cuts) -> np.ndarray:
    if max(len(c) for c in cuts) <= KERNEL_CUT_CAP:
        return _kernels.cut_lambda_max(state.amplitudes, state.n_qubits, cuts)
    # Large cuts: Gram matrices via LAPACK, one cut at a time.
    out = np.empty(len(cuts))
    for i, cut in enumerate(cuts):
        axes = [q - 1 for q in cut]
        rest = [ax for ax in range(state.n_qubits) if ax not in axes]
        t = state.amplitudes.reshape((2,) * state.n_qubits)
        mat = np.transpose(t, axes + rest).reshape(2 ** len(cut), -1)
        out[i] = np.linalg.eigvalsh(mat @ mat.conj().T)[-1].real
    return out


def ggm(state: PureState, policy: CutPolicy = ALL_CUTS) -> GgmValue:
    """Generalized geometric measure of a pure state.

    Under ``AllCuts`` the maximization runs over every subset of size up
    to floor(N/2). The achieving cut reported is the first (smallest,
    then lexicographically earliest) among all cuts within ``TIE_ATOL``
    of the maximum; the full tie group is returned as well.
    """
    if state.n_qubits < 2:
        raise ValueError("GGM needs at least two qubits")
    cuts = cut_subsets(policy, state.n_qubits)
    lam = _lambda_max_per_cut(state, cuts)
    lam_max = float(lam.max())
    tied = tuple(cuts[i] for i in np.flatnonzero(lam >= lam_max - TIE_ATOL))
    return GgmValue(
        value=1.0 - lam_max,
        max_schmidt_sq=lam_max,
        argmax_cut=tied[0],
        tied_cuts=tied,
    )
