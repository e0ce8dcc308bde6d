"""Haar-sampling campaigns over parametrized state families.

A campaign draws ``n_samples`` states from one family (free parameters
Haar-sampled), computes the requested measures per sample, and reduces
them to comparison statistics. Per-sample seeds derive from the campaign
seed and the sample index, so results are independent of worker count
and chunking.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .ggm import ALL_CUTS, ggm
from .localize import DEFAULT_SETTINGS, OptimizerSettings, conjecture_check, global_lggm, lggm
from .qstate import GW, DickeSuperposition, FourQubitClass, GHZClass, PureState, WClass, build

FAMILIES = ("haar", "gw", "dicke-sup", "w-class", "ghz-class", "mixed3",
            "fourq-1", "fourq-2", "fourq-3", "fourq-4", "fourq-5", "fourq-6")

#: Free complex parameters per parametrized four-qubit class.
_FOURQ_NPARAMS = {1: 4, 2: 3, 3: 2, 4: 2, 5: 1, 6: 1}


@dataclass(frozen=True)
class CampaignSpec:
    family: str
    n_qubits: int
    n_samples: int
    seed: int
    measures: tuple = ("G", "EL1")
    equality_tolerance: float = 1e-4
    conjecture: bool = False
    settings: OptimizerSettings = DEFAULT_SETTINGS

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; "
                             f"choose from {', '.join(FAMILIES)}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        for m in self.measures:
            if m not in ("G", "EL1", "EL12", "EGL"):
                raise ValueError(f"unknown measure {m!r}")
        if self.conjecture and self.n_qubits != 3:
            raise ValueError("conjecture checking applies to 3-qubit families")


@dataclass(frozen=True)
class CampaignSummary:
    n_samples: int
    equality_tolerance: float
    comparisons: dict
    conditional: dict
    conjecture_violations: Optional[int]


def sample_state(family: str, n_qubits: int, rng: np.random.Generator) -> PureState:
    """One Haar-parametrized draw from a family."""
    if family == "haar":
        z = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
        from .qstate import Raw
        return build(Raw(tuple(z)))
    if family == "gw":
        z = rng.standard_normal(n_qubits) + 1j * rng.standard_normal(n_qubits)
        return build(GW(tuple(z / np.linalg.norm(z))))
    if family == "dicke-sup":
        z = rng.standard_normal(n_qubits + 1) + 1j * rng.standard_normal(n_qubits + 1)
        return build(DickeSuperposition(tuple(z / np.linalg.norm(z))))
    if family == "w-class":
        return build(WClass(tuple(rng.dirichlet(np.ones(4)))))
    if family == "ghz-class":
        delta = rng.uniform(0.0, 0.25 * math.pi)
        gammas = tuple(rng.uniform(0.0, 0.5 * math.pi, 3))
        mu = rng.uniform(0.0, 2.0 * math.pi)
        return build(GHZClass(delta, gammas, mu))
    if family == "mixed3":
        # alternate W- and GHZ-class draws; the rng state decides parity
        if rng.integers(2) == 0:
            return sample_state("w-class", 3, rng)
        return sample_state("ghz-class", 3, rng)
    if family.startswith("fourq-"):
        index = int(family.split("-")[1])
        k = _FOURQ_NPARAMS[index]
        z = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        z = np.abs(z.real) + 1j * z.imag  # class parameters need Re >= 0
        return build(FourQubitClass(index, tuple(z)))
    raise ValueError(f"unknown family {family!r}")


def _one_sample(spec: CampaignSpec, index: int) -> dict:
    rng = np.random.default_rng((spec.seed, index))
    state = sample_state(spec.family, spec.n_qubits, rng)
    row = {"seed_index": index}
    if spec.conjecture:
        rep = conjecture_check(state, settings=spec.settings,
                               tolerance=spec.equality_tolerance)
        row["G"] = rep.ggm_value
        row["cut"] = ";".join(str(r) for r in rep.max_cut_qubits)
        for r in (1, 2, 3):
            row[f"EL{r}"] = rep.el_values[r - 1]
        row["holds"] = int(rep.holds)
        return row
    for name in spec.measures:
        if name == "G":
            row[name] = ggm(state).value
        elif name == "EL1":
            row[name] = lggm(state, (1,), settings=spec.settings).value
        elif name == "EL12":
            row[name] = lggm(state, (1, 2), settings=spec.settings).value
        elif name == "EGL":
            row[name] = global_lggm(state, 1, settings=spec.settings).best.value
    return row


def _worker(args):
    spec, indices = args
    return [_one_sample(spec, i) for i in indices]


def run_campaign(spec: CampaignSpec, n_jobs: Optional[int] = None) -> list:
    """All per-sample rows, ordered by sample index."""
    if n_jobs is None:
        n_jobs = int(os.environ.get("LGGM_THREADS", "0")) or (os.cpu_count() or 1)
    indices = list(range(spec.n_samples))
    if n_jobs <= 1 or spec.n_samples < 4:
        return _worker((spec, indices))
    chunk = max(1, math.ceil(spec.n_samples / (4 * n_jobs)))
    batches = [(spec, indices[i:i + chunk]) for i in range(0, len(indices), chunk)]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        out = []
        for rows in pool.map(_worker, batches):
            out.extend(rows)
    return out


def _compare(rows, a: str, b: str, tol: float) -> dict:
    gt = eq = lt = 0
    for row in rows:
        d = row[a] - row[b]
        if d > tol:
            gt += 1
        elif d < -tol:
            lt += 1
        else:
            eq += 1
    n = len(rows)
    return {
        "gt": gt, "eq": eq, "lt": lt,
        "frac_gt": gt / n, "frac_eq": eq / n, "frac_lt": lt / n,
    }


def summarize(spec: CampaignSpec, rows) -> CampaignSummary:
    """Comparison counts/fractions recomputable from the raw rows."""
    if spec.conjecture:
        violations = sum(1 for row in rows if not row["holds"])
        return CampaignSummary(
            n_samples=len(rows),
            equality_tolerance=spec.equality_tolerance,
            comparisons={},
            conditional={},
            conjecture_violations=violations,
        )
    tol = spec.equality_tolerance
    comparisons = {}
    pairs = [("EL1", "G"), ("EL12", "G"), ("EL12", "EL1"), ("EGL", "G")]
    for a, b in pairs:
        if a in spec.measures and b in spec.measures:
            comparisons[f"{a}_vs_{b}"] = _compare(rows, a, b, tol)
    conditional = {}
    if "EL1" in spec.measures and "EL12" in spec.measures and "G" in spec.measures:
        subset = [r for r in rows if r["EL1"] - r["G"] <= tol]
        if subset:
            conditional["EL12_gt_G_among_EL1_le_G"] = {
                "n": len(subset),
                "frac": sum(1 for r in subset if r["EL12"] - r["G"] > tol) / len(subset),
            }
    return CampaignSummary(
        n_samples=len(rows),
        equality_tolerance=tol,
        comparisons=comparisons,
        conditional=conditional,
        conjecture_violations=None,
    )
