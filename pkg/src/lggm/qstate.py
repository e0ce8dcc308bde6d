"""Multiqubit pure states: construction, sampling, partial trace, collapse.

Basis convention used throughout the package: the amplitude vector is
indexed by the integer whose binary expansion lists the qubits left to
right, i.e. qubit 1 is the most significant bit. ``|011>`` on three
qubits is index 3. All constructors normalize their input.
"""

import json
import math
import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from . import _kernels

NORM_ATOL = 1e-12
TRACE_ATOL = 1e-10
HERMITIAN_ATOL = 1e-12
PROB_SUM_ATOL = 1e-10

#: Refuse to allocate dense vectors above this qubit count (env override
#: LGGM_MAX_QUBITS); 2**26 complex amplitudes is a 1 GiB vector.
MAX_QUBITS = int(os.environ.get("LGGM_MAX_QUBITS", "26"))


class DimensionCapError(ValueError):
    """Requested state exceeds the configured dense-vector qubit cap."""


def _check_cap(n_qubits: int):
    if n_qubits > MAX_QUBITS:
        raise DimensionCapError(
            f"{n_qubits} qubits exceeds the cap of {MAX_QUBITS} "
            "(set LGGM_MAX_QUBITS or lggm.qstate.MAX_QUBITS to raise it)"
        )


@dataclass(frozen=True)
class PureState:
    """Normalized pure state of ``n_qubits`` qubits.

    Immutable after construction; the amplitude buffer is marked
    read-only so states can be shared freely between threads.
    """

    n_qubits: int
    amplitudes: np.ndarray
    symmetric: bool = False
    placeholder: bool = False

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        _check_cap(self.n_qubits)
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes, got {amps.shape}"
            )
        norm = np.linalg.norm(amps)
        if norm < 1e-12:
            raise ValueError("amplitude vector has (near-)zero norm")
        if abs(norm - 1.0) > NORM_ATOL:
            amps = amps / norm
        if amps is self.amplitudes:
            amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace density matrix for a qubit subset."""

    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        ent = np.ascontiguousarray(self.entries, dtype=np.complex128)
        dim = 2**self.n_qubits
        if ent.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {ent.shape}")
        if np.abs(ent - ent.conj().T).max() > HERMITIAN_ATOL:
            raise ValueError("matrix is not Hermitian within 1e-12")
        if abs(np.trace(ent).real - 1.0) > TRACE_ATOL:
            raise ValueError("trace differs from 1 beyond 1e-10")
        ent.flags.writeable = False
        object.__setattr__(self, "entries", ent)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


# --------------------------------------------------------------------------
# State families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GGHZ:
    """a1 |0...0> + a2 |1...1>."""
    a1: complex
    a2: complex
    n_qubits: int


@dataclass(frozen=True)
class GW:
    """sum_i a_i |0..1_i..0>, the coefficient index naming the excited qubit."""
    coeffs: tuple


@dataclass(frozen=True)
class Dicke:
    n_qubits: int
    k: int


@dataclass(frozen=True)
class DickeSuperposition:
    """sum_k a_k |D^N_k> with coefficients a_0 .. a_N."""
    coeffs: tuple


@dataclass(frozen=True)
class WClass:
    """sqrt(a1)|001> + sqrt(a2)|010> + sqrt(a3)|100> + sqrt(a4)|000>."""
    a: tuple


@dataclass(frozen=True)
class GHZClass:
    """sqrt(K)(cos d |000> + e^{i mu} sin d |n1 n2 n3>)."""
    delta: float
    gammas: tuple
    mu: float


@dataclass(frozen=True)
class FourQubitClass:
    """One of the nine four-qubit entanglement classes."""
    index: int
    params: tuple = ()


@dataclass(frozen=True)
class AppendixDExample:
    """Four- and five-qubit states showing a two-qubit measurement advantage."""
    which: int
    a: float


@dataclass(frozen=True)
class Raw:
    amplitudes: tuple


@dataclass(frozen=True)
class Haar:
    n_qubits: int
    seed: int


StateSpec = Union[GGHZ, GW, Dicke, DickeSuperposition, WClass, GHZClass,
                  FourQubitClass, AppendixDExample, Raw, Haar]


def _dicke_vector(n: int, k: int) -> np.ndarray:
    if not 0 <= k <= n:
        raise ValueError(f"Dicke excitation k={k} outside 0..{n}")
    amps = np.zeros(2**n, dtype=np.complex128)
    coeff = 1.0 / math.sqrt(math.comb(n, k))
    for ones in combinations(range(n), k):
        amps[sum(1 << (n - 1 - b) for b in ones)] = coeff
    return amps


# Nine four-qubit class representatives; rows are (basis-index, weight)
# pairs expressed through the free complex parameters p = (a1, a2, ...).
def _fourq_amplitudes(index: int, params: tuple) -> np.ndarray:
    def ket(bits: str) -> int:
        return int(bits, 2)

    amps = np.zeros(16, dtype=np.complex128)
    p = list(params)

    def need(count: int):
        if len(p) != count:
            raise ValueError(
                f"four-qubit class {index} takes {count} parameters, got {len(p)}"
            )

    if index == 1:
        need(4)
        a1, a2, a3, a4 = p
        for b in ("0000", "1111"):
            amps[ket(b)] += 0.5 * (a1 + a2)
        for b in ("0011", "1100"):
            amps[ket(b)] += 0.5 * (a1 - a2)
        for b in ("0101", "1010"):
            amps[ket(b)] += 0.5 * (a3 + a4)
        for b in ("0110", "1001"):
            amps[ket(b)] += 0.5 * (a3 - a4)
    elif index == 2:
        need(3)
        a1, a2, a3 = p
        for b in ("0000", "1111"):
            amps[ket(b)] += 0.5 * (a1 + a2)
        for b in ("0011", "1100"):
            amps[ket(b)] += 0.5 * (a1 - a2)
        for b in ("0101", "1010", "0110"):
            amps[ket(b)] += a3
    elif index == 3:
        need(2)
        a1, a2 = p
        for b in ("0000", "1111"):
            amps[ket(b)] += a1
        for b in ("0101", "1010", "0110", "0011"):
            amps[ket(b)] += a2
    elif index == 4:
        need(2)
        a1, a2 = p
        for b in ("0000", "1111"):
            amps[ket(b)] += a1
        for b in ("0101", "1010"):
            amps[ket(b)] += 0.5 * (a1 + a2)
        for b in ("0110", "1001"):
            amps[ket(b)] += 0.5 * (a1 - a2)
        for b in ("0001", "0010", "0111", "1011"):
            amps[ket(b)] += 0.5j * math.sqrt(2)
    elif index == 5:
        need(1)
        a1 = p[0]
        for b in ("0000", "0101", "1010", "1111"):
            amps[ket(b)] += a1
        amps[ket("0001")] += 1j
        amps[ket("0110")] += 1.0
        amps[ket("1011")] += -1j
    elif index == 6:
        need(1)
        a1 = p[0]
        for b in ("0000", "1111"):
            amps[ket(b)] += a1
        for b in ("0011", "0101", "0110"):
            amps[ket(b)] += 1.0
    elif index == 7:
        need(0)
        for b in ("0000", "0101", "1000", "1110"):
            amps[ket(b)] = 1.0
    elif index == 8:
        need(0)
        for b in ("0000", "1011", "1101", "1110"):
            amps[ket(b)] = 1.0
    elif index == 9:
        need(0)
        for b in ("0000", "0111"):
            amps[ket(b)] = 1.0
    else:
        raise ValueError(f"four-qubit class index {index} outside 1..9")
    return amps


def build(spec: StateSpec) -> PureState:
    """Construct the pure state named by ``spec``.

    Unnormalized inputs are rescaled. Families that are permutation
    symmetric carry ``symmetric=True``, which lets position optimization
    evaluate a single representative set.
    """
    if isinstance(spec, GGHZ):
        n = spec.n_qubits
        if n < 2:
            raise ValueError("gGHZ needs at least two qubits")
        _check_cap(n)
        amps = np.zeros(2**n, dtype=np.complex128)
        amps[0] = spec.a1
        amps[-1] = spec.a2
        return PureState(n, amps, symmetric=True)

    if isinstance(spec, GW):
        coeffs = np.asarray(spec.coeffs, dtype=np.complex128)
        n = coeffs.size
        if n < 2:
            raise ValueError("gW needs at least two qubits")
        _check_cap(n)
        amps = np.zeros(2**n, dtype=np.complex128)
        for i, a in enumerate(coeffs):
            amps[1 << (n - 1 - i)] = a
        return PureState(n, amps)

    if isinstance(spec, Dicke):
        _check_cap(spec.n_qubits)
        return PureState(spec.n_qubits, _dicke_vector(spec.n_qubits, spec.k),
                         symmetric=True)

    if isinstance(spec, DickeSuperposition):
        coeffs = np.asarray(spec.coeffs, dtype=np.complex128)
        n = coeffs.size - 1
        if n < 2:
            raise ValueError("Dicke superposition needs at least two qubits")
        _check_cap(n)
        amps = np.zeros(2**n, dtype=np.complex128)
        for k, a in enumerate(coeffs):
            if a != 0:
                amps += a * _dicke_vector(n, k)
        return PureState(n, amps, symmetric=True)

    if isinstance(spec, WClass):
        a = np.asarray(spec.a, dtype=np.float64)
        if a.shape != (4,):
            raise ValueError("W class takes four probabilities (a1..a4)")
        if a[3] < -1e-12:
            raise ValueError("W class requires a4 = 1 - (a1+a2+a3) >= 0")
        if np.any(a[:3] <= 0):
            raise ValueError("W class requires a1, a2, a3 > 0")
        a = a / a.sum()
        amps = np.zeros(8, dtype=np.complex128)
        amps[0b001] = math.sqrt(a[0])
        amps[0b010] = math.sqrt(a[1])
        amps[0b100] = math.sqrt(a[2])
        amps[0b000] = math.sqrt(max(a[3], 0.0))
        return PureState(3, amps)

    if isinstance(spec, GHZClass):
        d, (g1, g2, g3), mu = spec.delta, spec.gammas, spec.mu
        eta = [np.array([math.cos(g), math.sin(g)]) for g in (g1, g2, g3)]
        prod = np.kron(np.kron(eta[0], eta[1]), eta[2]).astype(np.complex128)
        amps = math.cos(d) * np.eye(8, dtype=np.complex128)[0]
        amps = amps + np.exp(1j * mu) * math.sin(d) * prod
        return PureState(3, amps)  # normalization supplies the K factor

    if isinstance(spec, FourQubitClass):
        return PureState(4, _fourq_amplitudes(spec.index, tuple(spec.params)))

    if isinstance(spec, AppendixDExample):
        a = float(spec.a)
        if not 0.0 <= a <= 0.5:
            raise ValueError("parameter a must lie in [0, 1/2]")
        if spec.which == 1:
            amps = np.zeros(16, dtype=np.complex128)
            for b in ("0000", "0011", "1100", "1111"):
                amps[int(b, 2)] = a
            w = math.sqrt((1.0 - 4.0 * a * a) / 6.0)
            for b in ("0101", "1010", "0110", "1001", "1011", "0100"):
                amps[int(b, 2)] = w
            return PureState(4, amps)
        if spec.which == 2:
            amps = np.zeros(32, dtype=np.complex128)
            for b in ("00000", "00111", "11000", "11111"):
                amps[int(b, 2)] = a
            w = math.sqrt((1.0 - 4.0 * a * a) / 4.0)
            for b in ("01010", "10101", "00001", "10000"):
                amps[int(b, 2)] = w
            return PureState(5, amps)
        raise ValueError("example index must be 1 or 2")

    if isinstance(spec, Raw):
        amps = np.asarray(spec.amplitudes, dtype=np.complex128)
        n = int(round(math.log2(amps.size)))
        if 2**n != amps.size:
            raise ValueError("amplitude count must be a power of two")
        return PureState(n, amps)

    if isinstance(spec, Haar):
        return haar_random(spec.n_qubits, spec.seed)

    raise TypeError(f"unknown state spec {type(spec).__name__}")


def ghz(n_qubits: int) -> PureState:
    s = 1.0 / math.sqrt(2.0)
    return build(GGHZ(s, s, n_qubits))


def w_state(n_qubits: int) -> PureState:
    return build(Dicke(n_qubits, 1))


def haar_random(n_qubits: int, seed: int) -> PureState:
    """Haar-uniform pure state from normalized complex Gaussians."""
    if n_qubits < 2:
        raise ValueError("Haar sampling requires at least two qubits")
    _check_cap(n_qubits)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    return PureState(n_qubits, z)


# --------------------------------------------------------------------------
# Partial trace and projective collapse
# --------------------------------------------------------------------------

def _check_subset(n: int, subset) -> tuple:
    subset = tuple(int(q) for q in subset)
    if not subset:
        raise ValueError("qubit subset must be nonempty")
    if len(set(subset)) != len(subset):
        raise ValueError(f"qubit positions must be distinct, got {subset}")
    for q in subset:
        if not 1 <= q <= n:
            raise ValueError(f"qubit position {q} outside 1..{n}")
    return subset


def reduced_density(state: PureState, subset: Sequence[int]) -> DensityMatrix:
    """Partial trace of ``|psi><psi|`` onto the given qubit positions."""
    subset = _check_subset(state.n_qubits, subset)
    axes = [q - 1 for q in subset]
    rest = [ax for ax in range(state.n_qubits) if ax not in axes]
    t = state.amplitudes.reshape((2,) * state.n_qubits)
    mat = np.transpose(t, axes + rest).reshape(2 ** len(subset), -1)
    rho = mat @ mat.conj().T
    rho = 0.5 * (rho + rho.conj().T)  # scrub rounding asymmetry
    return DensityMatrix(len(subset), rho)


def _wrap_angles(angles) -> list:
    out = []
    for theta, phi in angles:
        theta = float(theta) % (2.0 * math.pi)
        if theta > math.pi + 1e-9:
            raise ValueError(f"theta={theta} outside [0, pi]")
        out.append((min(theta, math.pi), float(phi) % (2.0 * math.pi)))
    return out


def project_and_trace(state: PureState, positions: Sequence[int],
                      angles, outcome: int):
    """Rank-1 projective measurement of ``positions`` followed by tracing.

    ``angles`` holds one ``(theta, phi)`` pair per measured qubit in
    position order; ``outcome`` packs one bit per measured qubit with the
    first-listed qubit in the most significant bit (bit 0 selects the
    first projector of the pair). Phi is 2pi-periodic; theta beyond
    ``[0, pi]`` is rejected. Returns ``(p, state)``; a branch with
    ``p < 1e-12`` returns probability 0 and a flagged placeholder.
    """
    n = state.n_qubits
    positions = _check_subset(n, positions)
    if sorted(positions) != list(positions):
        raise ValueError("positions must be sorted ascending")
    m = len(positions)
    if n - m < 2:
        raise ValueError(f"measuring {m} of {n} qubits leaves fewer than 2")
    if len(angles) != m:
        raise ValueError("need one (theta, phi) pair per measured qubit")
    if not 0 <= outcome < 2**m:
        raise ValueError(f"outcome {outcome} outside 0..{2**m - 1}")
    wrapped = _wrap_angles(angles)
    thetas = np.array([a[0] for a in wrapped])
    phis = np.array([a[1] for a in wrapped])
    p, amps = _kernels.collapse(state.amplitudes, n, positions, thetas, phis,
                                outcome)
    if p == 0.0:
        basis0 = np.zeros(2 ** (n - m), dtype=np.complex128)
        basis0[0] = 1.0
        return 0.0, PureState(n - m, basis0, placeholder=True)
    return p, PureState(n - m, amps)


def apply_single_qubit_unitary(state: PureState, position: int,
                               u: np.ndarray) -> PureState:
    """Apply a 2x2 unitary to one qubit (used for local-unitary checks)."""
    (position,) = _check_subset(state.n_qubits, [position])
    t = state.amplitudes.reshape((2,) * state.n_qubits)
    t = np.tensordot(np.asarray(u, dtype=np.complex128), t,
                     axes=([1], [position - 1]))
    t = np.moveaxis(t, 0, position - 1)
    return PureState(state.n_qubits, t.reshape(-1),
                     symmetric=state.symmetric)


# --------------------------------------------------------------------------
# JSON state files
# --------------------------------------------------------------------------

def save_state_json(state: PureState, path: str):
    """Write ``{"n_qubits": N, "amplitudes": [[re, im], ...]}``."""
    payload = {
        "n_qubits": state.n_qubits,
        "amplitudes": [[float(a.real), float(a.imag)]
                       for a in state.amplitudes],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_state_json(path: str) -> PureState:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        n = int(payload["n_qubits"])
        pairs = payload["amplitudes"]
        amps = np.array([complex(re, im) for re, im in pairs])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state file {path}: {exc}") from exc
    if amps.size != 2**n:
        raise ValueError(
            f"state file lists {amps.size} amplitudes for {n} qubits"
        )
    return PureState(n, amps)
