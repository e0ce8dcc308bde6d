"""Localizable GGM: maximize the average post-measurement GGM over local
projective measurement bases.

The supremum over bases has no closed-form procedure, so the optimizer
evaluates a uniform angle grid (always containing theta in {0, pi/2, pi}
and phi = 0) and refines the best grid point with a Nelder-Mead simplex.
The reported value is therefore a certified lower bound on the supremum,
and it never falls below the computational-basis value.
"""

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .ggm import ALL_CUTS, KERNEL_CUT_CAP, CutPolicy, cut_subsets, ggm
from .qstate import PureState, project_and_trace

#: Hard cap on the number of grid combinations a single scan may visit.
MAX_GRID_COMBOS = 20_000_000

CONSISTENCY_ATOL = 1e-9


@dataclass(frozen=True)
class MeasurementConfig:
    """Measured qubit positions and one (theta, phi) pair per position."""

    positions: tuple
    angles: tuple

    def __post_init__(self):
        positions = tuple(int(p) for p in self.positions)
        angles = tuple((float(t), float(f)) for t, f in self.angles)
        if len(positions) < 1:
            raise ValueError("measure at least one qubit")
        if len(set(positions)) != len(positions):
            raise ValueError("positions must be distinct")
        if list(positions) != sorted(positions):
            raise ValueError("positions must be sorted ascending")
        if len(angles) != len(positions):
            raise ValueError("need one angle pair per measured qubit")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "angles", angles)


@dataclass(frozen=True)
class Ensemble:
    """Post-measurement outcome ensemble: (probability, collapsed state)."""

    entries: tuple

    def __post_init__(self):
        total = sum(p for p, _ in self.entries)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if any(p < 0 for p, _ in self.entries):
            raise ValueError("negative probability")


@dataclass(frozen=True)
class OptimizerSettings:
    grid_points_per_angle: int = 24
    refine_iterations: int = 200
    refine_tolerance: float = 1e-7
    include_computational_basis: bool = True

    def __post_init__(self):
        if self.grid_points_per_angle < 2:
            raise ValueError("grid needs at least 2 points per angle")
        if self.refine_tolerance <= 0:
            raise ValueError("refine tolerance must be positive")


DEFAULT_SETTINGS = OptimizerSettings()


@dataclass(frozen=True)
class LggmResult:
    value: float
    optimal_angles: tuple
    per_outcome: tuple
    evaluations: int


@dataclass(frozen=True)
class GlobalLggmResult:
    best: LggmResult
    best_positions: tuple
    per_positions: dict


def ensemble(state: PureState, config: MeasurementConfig) -> Ensemble:
    """All 2**m projective branches of a measurement configuration."""
    m = len(config.positions)
    entries = []
    for outcome in range(2**m):
        p, collapsed = project_and_trace(state, config.positions,
                                         config.angles, outcome)
        entries.append((p, collapsed))
    return Ensemble(tuple(entries))


def average_ggm(ens: Ensemble, policy: CutPolicy = ALL_CUTS) -> float:
    """Probability-weighted average GGM; zero-probability branches drop out."""
    total = 0.0
    for p, state in ens.entries:
        if p == 0.0 or state.placeholder:
            continue
        total += p * ggm(state, policy).value
    return total


# --------------------------------------------------------------------------
# Angle optimization
# --------------------------------------------------------------------------

def _theta_grid(settings: OptimizerSettings) -> np.ndarray:
    grid = np.linspace(0.0, math.pi, settings.grid_points_per_angle)
    if settings.include_computational_basis:
        grid = np.concatenate([grid, [0.0, 0.5 * math.pi, math.pi]])
    grid = np.unique(np.round(grid, 14))
    return grid


def _phi_grid(settings: OptimizerSettings) -> np.ndarray:
    g = settings.grid_points_per_angle
    return np.arange(g) * (2.0 * math.pi / g)  # phi = 0 is always on the grid


def canonicalize_angles(angles: np.ndarray, pole_tol: float = 1e-10) -> np.ndarray:
    """Map angles into theta in [0, pi], phi in [0, 2pi); phi := 0 at poles.

    Refinement leaves near-pole optima within its simplex tolerance of
    theta = 0 or pi; ``pole_tol`` snaps those onto the pole, where phi is
    immaterial.
    """
    out = np.array(angles, dtype=float).copy()
    two_pi = 2.0 * math.pi
    for j in range(0, out.size, 2):
        t = out[j] % two_pi
        f = out[j + 1]
        if t > math.pi:
            t = two_pi - t
            f = f + math.pi
        f = f % two_pi
        if t < pole_tol:
            t, f = 0.0, 0.0
        elif abs(t - math.pi) < pole_tol:
            t, f = math.pi, 0.0
        out[j], out[j + 1] = t, f
    return out


def maximize_over_angles(objective: Callable[[np.ndarray], float], m: int,
                         settings: OptimizerSettings,
                         extra_seeds: Sequence[np.ndarray] = (),
                         grid_scan=None):
    """Grid scan plus Nelder-Mead refinement over 2m measurement angles.

    ``grid_scan`` may supply a fused scanner ``(theta_grid, phi_grid) ->
    (value, angles)``; otherwise the grid is walked through ``objective``.
    Refinement stops when the simplex diameter drops below the configured
    tolerance or the iteration budget runs out. Returns
    ``(value, canonical_angles, evaluations)``.
    """
    thetas = _theta_grid(settings)
    phis = _phi_grid(settings)
    per_qubit = thetas.size * phis.size
    if per_qubit**m > MAX_GRID_COMBOS:
        raise ValueError(
            f"grid of {per_qubit**m} angle combinations exceeds the cap; "
            "lower grid_points_per_angle"
        )
    if grid_scan is not None:
        best_val, best_angles = grid_scan(thetas, phis)
    else:
        best_val = -np.inf
        best_angles = np.zeros(2 * m)
        angles = np.zeros(2 * m)
        for flat in range(per_qubit**m):
            rem = flat
            for j in range(m - 1, -1, -1):
                cj = rem % per_qubit
                rem //= per_qubit
                angles[2 * j] = thetas[cj // phis.size]
                angles[2 * j + 1] = phis[cj % phis.size]
            val = objective(angles)
            if val > best_val:
                best_val, best_angles = val, angles.copy()
    evaluations = per_qubit**m

    seeds = [np.asarray(best_angles, dtype=float)]
    seeds.extend(np.asarray(s, dtype=float) for s in extra_seeds)
    best = (best_val, np.asarray(best_angles, dtype=float))
    for seed in seeds:
        res = minimize(
            lambda x: -objective(x),
            seed,
            method="Nelder-Mead",
            options={
                "maxiter": settings.refine_iterations,
                "xatol": settings.refine_tolerance,
                "fatol": np.inf,  # terminate on simplex diameter alone
            },
        )
        evaluations += res.nfev
        if -res.fun > best[0]:
            best = (-res.fun, res.x)
    pole_tol = max(1e-10, 2.0 * settings.refine_tolerance)
    canonical = canonicalize_angles(best[1], pole_tol)
    value = objective(canonical)
    evaluations += 1
    if value < best[0] - 1e-11:
        # pole snapping cost more than rounding noise; keep the raw optimum
        canonical = canonicalize_angles(best[1])
        value = objective(canonical)
        evaluations += 1
    return value, canonical, evaluations


def _check_cut_sizes(cuts):
    if max(len(c) for c in cuts) > KERNEL_CUT_CAP:
        raise ValueError(
            f"angle optimization supports cuts up to size {KERNEL_CUT_CAP}; "
            "restrict the cut policy"
        )


def lggm(state: PureState, positions: Sequence[int],
         settings: Optional[OptimizerSettings] = None,
         policy: CutPolicy = ALL_CUTS,
         extra_seed_angles: Sequence = ()) -> LggmResult:
    """Localizable GGM for measurements on a fixed set of qubit positions.

    Maximizes ``sum_l p_l GGM(psi_l)`` over the 2m angles of the product
    projector basis. ``extra_seed_angles`` adds refinement starting
    points (used to warm-start parameter sweeps).
    """
    settings = settings or DEFAULT_SETTINGS
    positions = tuple(sorted(int(p) for p in positions))
    m = len(positions)
    n = state.n_qubits
    if len(set(positions)) != m or m < 1:
        raise ValueError("positions must be distinct and nonempty")
    if positions[0] < 1 or positions[-1] > n:
        raise ValueError(f"positions outside 1..{n}")
    if n - m < 2:
        raise ValueError("at least two qubits must remain unmeasured")
    cuts = cut_subsets(policy, n - m)
    _check_cut_sizes(cuts)
    amps = state.amplitudes

    def objective(angles: np.ndarray) -> float:
        return _kernels.avg_ggm_objective(amps, n, positions,
                                          np.asarray(angles, dtype=float),
                                          cuts)

    def fused_scan(thetas, phis):
        return _kernels.grid_scan(amps, n, positions, thetas, phis, cuts)

    value, angles, evaluations = maximize_over_angles(
        objective, m, settings, extra_seeds=extra_seed_angles,
        grid_scan=fused_scan,
    )
    pairs = tuple((angles[2 * j], angles[2 * j + 1]) for j in range(m))
    ens = ensemble(state, MeasurementConfig(positions, pairs))
    per_outcome = tuple(
        (p, 0.0 if (p == 0.0 or st.placeholder) else ggm(st, policy).value)
        for p, st in ens.entries
    )
    recomputed = sum(p * g for p, g in per_outcome)
    if abs(recomputed - value) > CONSISTENCY_ATOL:
        raise AssertionError(
            f"optimizer value {value} disagrees with ensemble average "
            f"{recomputed}"
        )
    return LggmResult(value=value, optimal_angles=pairs,
                      per_outcome=per_outcome, evaluations=evaluations)


def global_lggm(state: PureState, m: int,
                settings: Optional[OptimizerSettings] = None,
                policy: CutPolicy = ALL_CUTS,
                symmetric: Optional[bool] = None) -> GlobalLggmResult:
    """Maximize the LGGM over all C(N, m) measured-position sets.

    Symmetric states (flagged on the state or forced via ``symmetric``)
    are evaluated at the single representative set {1..m}. Ties between
    position sets resolve to the lexicographically smallest.
    """
    n = state.n_qubits
    if not 1 <= m <= n - 2:
        raise ValueError(f"m={m} outside 1..{n - 2}")
    if symmetric is None:
        symmetric = state.symmetric
    if symmetric:
        sets = [tuple(range(1, m + 1))]
    else:
        sets = list(combinations(range(1, n + 1), m))
    per = {}
    best_positions = None
    for positions in sets:
        res = lggm(state, positions, settings=settings, policy=policy)
        per[positions] = res
        if best_positions is None or res.value > per[best_positions].value:
            best_positions = positions
    return GlobalLggmResult(best=per[best_positions],
                            best_positions=best_positions,
                            per_positions=per)


# --------------------------------------------------------------------------
# Three-qubit conjecture
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConjectureReport:
    """Check that measuring the max-Schmidt qubit can only raise the GGM.

    For a three-qubit pure state with maximal Schmidt coefficient across
    the r:rest bipartition, the conjecture asserts E_L^r >= G and
    E_L^{r'} = G for r' != r.
    """

    ggm_value: float
    max_cut_qubits: tuple
    el_values: tuple
    holds: bool
    worst_violation: float


def conjecture_check(state: PureState,
                     settings: Optional[OptimizerSettings] = None,
                     tolerance: float = 1e-4) -> ConjectureReport:
    if state.n_qubits != 3:
        raise ValueError("the conjecture concerns three-qubit states")
    g = ggm(state)
    max_cut = tuple(c[0] for c in g.tied_cuts)
    els = tuple(lggm(state, (r,), settings=settings).value for r in (1, 2, 3))
    worst = 0.0
    for r in (1, 2, 3):
        el = els[r - 1]
        if r in max_cut:
            worst = max(worst, g.value - el)
        else:
            worst = max(worst, abs(el - g.value))
    return ConjectureReport(
        ggm_value=g.value,
        max_cut_qubits=max_cut,
        el_values=els,
        holds=worst <= tolerance,
        worst_violation=worst,
    )
