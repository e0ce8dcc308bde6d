"""GGM and localizable GGM of multiqubit pure states.

Quantifies genuine multipartite entanglement through the largest Schmidt
coefficient over bipartitions, and the amount of it that local projective
measurements can concentrate on the unmeasured qubits. Includes exact
Lanczos ground states of the transverse-field Ising and XXZ chains for
phase-transition studies, plus a CLI for measures, sampling campaigns and
parameter sweeps.
"""

from ._kernels import BACKEND
from .ggm import ALL_CUTS, AllCuts, CutPolicy, ExplicitCuts, GgmValue, MaxCutSize, ggm, max_eigenvalue, schmidt_spectrum
from .localize import (
    ConjectureReport,
    Ensemble,
    GlobalLggmResult,
    LggmResult,
    MeasurementConfig,
    OptimizerSettings,
    average_ggm,
    conjecture_check,
    ensemble,
    global_lggm,
    lggm,
)
from .qstate import (
    GGHZ,
    GW,
    AppendixDExample,
    Dicke,
    DickeSuperposition,
    DensityMatrix,
    DimensionCapError,
    FourQubitClass,
    GHZClass,
    Haar,
    PureState,
    Raw,
    StateSpec,
    WClass,
    build,
    ghz,
    haar_random,
    load_state_json,
    project_and_trace,
    reduced_density,
    save_state_json,
    w_state,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
