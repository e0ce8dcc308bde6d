"""Pure-numpy implementations of the hot kernels.

Semantics here define the contract the compiled core must match: the
selected backend is interchangeable up to floating-point rounding.
Conventions shared by both backends:

* basis index ``i`` over ``2**n`` states, qubit 1 is the most significant
  bit (qubit ``q`` lives on bit ``n - q``);
* measurement positions are 1-based qubit indices, sorted ascending;
* outcome ``l`` packs one bit per measured qubit, first-listed qubit in
  the most significant bit, ``0`` meaning the first projector of the pair;
* outcomes with probability below ``P_FLOOR`` contribute zero to averages.
"""

from functools import lru_cache, reduce

import numpy as np

# Probability floor below which a measurement branch is dropped.
P_FLOOR = 1e-12


def projector_rows(theta: float, phi: float) -> np.ndarray:
    """Conjugated bra coefficients of the two rank-1 projectors.

    Row ``l`` holds ``conj(<xi_l|v>)`` for ``v = 0, 1`` where the kets are
    ``|xi_0> = cos(t/2)|0> + e^{i phi} sin(t/2)|1>`` and
    ``|xi_1> = -sin(t/2) e^{-i phi}|0> + cos(t/2)|1>``.
    """
    c = np.cos(0.5 * theta)
    s = np.sin(0.5 * theta)
    e = np.exp(1j * phi)
    return np.array([[c, s / e], [-s * e, c]], dtype=np.complex128)


def _measured_first(amps: np.ndarray, n: int, positions) -> np.ndarray:
    """Reshape amplitudes to (2**m, 2**(n-m)) with measured qubits leading."""
    m = len(positions)
    axes = [p - 1 for p in positions]
    rest = [ax for ax in range(n) if ax not in axes]
    t = amps.reshape((2,) * n)
    return np.transpose(t, axes + rest).reshape(2**m, -1)


def _outcome_row(positions, thetas, phis, outcome: int) -> np.ndarray:
    """Kronecker product of per-qubit projector rows for one joint outcome."""
    m = len(positions)
    rows = [
        projector_rows(thetas[j], phis[j])[(outcome >> (m - 1 - j)) & 1]
        for j in range(m)
    ]
    return reduce(np.kron, rows)


def collapse(amps, n, positions, thetas, phis, outcome):
    """Project the measured qubits onto one joint outcome and trace them out.

    Returns ``(p, state)`` with ``state`` normalized on the remaining
    ``n - m`` qubits; ``(0.0, zeros)`` when ``p < P_FLOOR``.
    """
    mat = _measured_first(amps, n, positions)
    out = _outcome_row(positions, thetas, phis, outcome) @ mat
    p = float(np.vdot(out, out).real)
    if p < P_FLOOR:
        return 0.0, np.zeros(out.shape[0], dtype=np.complex128)
    return p, out / np.sqrt(p)


def _cut_matrix(amps: np.ndarray, n: int, cut) -> np.ndarray:
    axes = [q - 1 for q in cut]
    rest = [ax for ax in range(n) if ax not in axes]
    t = amps.reshape((2,) * n)
    return np.transpose(t, axes + rest).reshape(2 ** len(cut), -1)


def cut_lambda_max(amps, n, cuts):
    """Largest reduced-density eigenvalue for every bipartition cut."""
    out = np.empty(len(cuts))
    for i, cut in enumerate(cuts):
        mat = _cut_matrix(amps, n, cut)
        gram = mat @ mat.conj().T
        out[i] = np.linalg.eigvalsh(gram)[-1].real
    return out


def _ggm_of(vec_unnorm: np.ndarray, p: float, n: int, cuts) -> float:
    lam = cut_lambda_max(vec_unnorm, n, cuts).max()
    return p - lam  # p * (1 - lam/p) without renormalizing


def avg_ggm_objective(amps, n, positions, angles, cuts):
    """Average post-measurement GGM for one set of measurement angles.

    ``angles`` is the flat vector ``(theta_1, phi_1, ..., theta_m, phi_m)``.
    """
    m = len(positions)
    thetas = angles[0::2]
    phis = angles[1::2]
    mat = _measured_first(amps, n, positions)
    n_rest = n - m
    total = 0.0
    for outcome in range(2**m):
        out = _outcome_row(positions, thetas, phis, outcome) @ mat
        p = float(np.vdot(out, out).real)
        if p < P_FLOOR:
            continue
        total += _ggm_of(out, p, n_rest, cuts)
    return total


def grid_scan(amps, n, positions, theta_grid, phi_grid, cuts):
    """Scan the full product grid of per-qubit angles; return the best point.

    Every measured qubit ranges over the same ``theta_grid x phi_grid``.
    Ties keep the earliest combination in odometer order, so the result is
    deterministic. Returns ``(best_value, best_angles)``.
    """
    m = len(positions)
    if m == 1:
        return _grid_scan_m1(amps, n, positions, theta_grid, phi_grid, cuts)
    n_t, n_p = len(theta_grid), len(phi_grid)
    per_qubit = n_t * n_p
    best_val = -np.inf
    best = np.zeros(2 * m)
    angles = np.zeros(2 * m)
    for flat in range(per_qubit**m):
        rem = flat
        for j in range(m - 1, -1, -1):
            cj = rem % per_qubit
            rem //= per_qubit
            angles[2 * j] = theta_grid[cj // n_p]
            angles[2 * j + 1] = phi_grid[cj % n_p]
        val = avg_ggm_objective(amps, n, positions, angles, cuts)
        if val > best_val:
            best_val = val
            best = angles.copy()
    return best_val, best


def _grid_scan_m1(amps, n, positions, theta_grid, phi_grid, cuts):
    # Vectorized single-qubit scan: collapse every grid point at once,
    # then batch the per-cut Gram eigenproblems.
    mat = _measured_first(amps, n, positions)  # (2, 2**(n-1))
    tt, pp = np.meshgrid(theta_grid, phi_grid, indexing="ij")
    tt = tt.ravel()
    pp = pp.ravel()
    c = np.cos(0.5 * tt)
    s = np.sin(0.5 * tt)
    e = np.exp(1j * pp)
    # rows[l, g, v] = conj(<xi_l|v>) per grid point g
    rows = np.empty((2, tt.size, 2), dtype=np.complex128)
    rows[0, :, 0] = c
    rows[0, :, 1] = s / e
    rows[1, :, 0] = -s * e
    rows[1, :, 1] = c
    branches = np.einsum("lgv,vr->lgr", rows, mat)
    p = np.einsum("lgr,lgr->lg", branches, branches.conj()).real
    n_rest = n - 1
    lam = np.zeros((2, tt.size))
    for cut in cuts:
        axes = [q - 1 for q in cut]
        rest = [ax for ax in range(n_rest) if ax not in axes]
        x = branches.reshape((2, tt.size) + (2,) * n_rest)
        x = np.transpose(x, (0, 1) + tuple(a + 2 for a in axes + rest))
        x = x.reshape(2, tt.size, 2 ** len(cut), -1)
        gram = np.einsum("lgab,lgcb->lgac", x, x.conj())
        lam = np.maximum(lam, np.linalg.eigvalsh(gram)[..., -1].real)
    vals = np.where(p >= P_FLOOR, p - lam, 0.0).sum(axis=0)
    g_best = int(np.argmax(vals))
    return float(vals[g_best]), np.array([tt[g_best], pp[g_best]])


@lru_cache(maxsize=32)
def _zmag(n: int) -> np.ndarray:
    # sum_i sigma^z eigenvalue per basis state: n minus twice the popcount
    idx = np.arange(2**n, dtype=np.uint64)
    pc = np.zeros(2**n, dtype=np.int64)
    for b in range(n):
        pc += ((idx >> np.uint64(b)) & np.uint64(1)).astype(np.int64)
    return (n - 2 * pc).astype(np.float64)


@lru_cache(maxsize=32)
def _bond_bits(n: int):
    # PBC bonds (site, site+1) with site N wrapping to 1; qubit q on bit n-q
    return tuple(
        (n - 1 - s, n - 1 - ((s + 1) % n)) for s in range(n)
    )


def apply_ising(v, n, coupling, field):
    """Transverse-field Ising matvec: J sum sx.sx + h sum sz, PBC."""
    idx = np.arange(2**n, dtype=np.uint64)
    out = field * _zmag(n) * v
    for b1, b2 in _bond_bits(n):
        mask = np.uint64((1 << b1) | (1 << b2))
        out += coupling * v[idx ^ mask]
    return out


def apply_xxz(v, n, coupling, anisotropy, field):
    """XXZ matvec: J' sum (sx.sx + sy.sy - D sz.sz) + h' sum sz, PBC."""
    idx = np.arange(2**n, dtype=np.uint64)
    diag = field * _zmag(n)
    out = np.zeros_like(v)
    for b1, b2 in _bond_bits(n):
        z1 = ((idx >> np.uint64(b1)) & np.uint64(1)).astype(np.int64)
        z2 = ((idx >> np.uint64(b2)) & np.uint64(1)).astype(np.int64)
        differ = z1 != z2
        diag += -coupling * anisotropy * (1.0 - 2.0 * (z1 ^ z2))
        mask = np.uint64((1 << b1) | (1 << b2))
        flipped = idx[differ] ^ mask
        out[flipped] += 2.0 * coupling * v[differ]
    out += diag * v
    return out
