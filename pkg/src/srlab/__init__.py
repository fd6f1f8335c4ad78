"""srlab: steady states, stability, fluctuations, and Wigner maps for a
squeezed-drive collective-spin cavity.

All frequencies and rates are angular, in rad/us, written MHz throughout;
hbar = 1. The semiclassical layer works with scaled variables (field per
sqrt of atom number, spin per atom number) so its results are independent
of the atom count; the quantum layer is exact in the fully symmetric Dicke
sector at finite atom number.
"""

from ._version import __version__
from .core import rhs_array, semiclassical_rhs, spin_norm
from .errors import (
    BoundaryPole,
    ConfigError,
    CutoffTooSmall,
    DegenerateDetuning,
    EigenFailure,
    NoStableSolution,
    NonConvergence,
    OffShell,
    SrlabError,
    StepRejected,
    UnequalDetunings,
    UnstableDrift,
    ZeroCoupling,
)
from .fluctuations import (
    FluctuationMap,
    diffusion_matrix,
    fluctuation_map,
    lyapunov_solve,
    np_variance_closed_form,
    photon_fluctuation,
    point_fluctuations,
)
from .meanfield import (
    alpha_from_z,
    boundary_g_lower,
    boundary_g_upper,
    branch_map,
    classify_phase,
    fixed_points,
    np_sp_onset,
    z_branches,
)
from .params import (
    ALL_BRANCHES,
    BranchLabel,
    FixedPoint,
    ModelParams,
    PhaseLabel,
    PhaseResult,
    SemiclassicalState,
    StabilityVerdict,
    meanfield_detuning,
)
from .quantum import (
    HilbertSpec,
    WignerGrid,
    build_hamiltonian,
    build_liouvillian,
    collective_spin,
    cutoff_convergence,
    mean_photon,
    reduced_cavity,
    steady_state,
    time_evolve,
    wigner,
    wigner_cavity,
)
from .stability import assess_stability, jacobian, spectrum_and_verdict
from .sweep import SweepConfig, parse_config, run_sweep

__all__ = [
    "__version__",
    "ALL_BRANCHES",
    "BoundaryPole",
    "BranchLabel",
    "ConfigError",
    "CutoffTooSmall",
    "DegenerateDetuning",
    "EigenFailure",
    "FixedPoint",
    "FluctuationMap",
    "HilbertSpec",
    "ModelParams",
    "NoStableSolution",
    "NonConvergence",
    "OffShell",
    "PhaseLabel",
    "PhaseResult",
    "SemiclassicalState",
    "SrlabError",
    "StabilityVerdict",
    "StepRejected",
    "SweepConfig",
    "UnequalDetunings",
    "UnstableDrift",
    "WignerGrid",
    "ZeroCoupling",
    "alpha_from_z",
    "assess_stability",
    "boundary_g_lower",
    "boundary_g_upper",
    "branch_map",
    "build_hamiltonian",
    "build_liouvillian",
    "classify_phase",
    "collective_spin",
    "cutoff_convergence",
    "diffusion_matrix",
    "fixed_points",
    "fluctuation_map",
    "jacobian",
    "lyapunov_solve",
    "mean_photon",
    "meanfield_detuning",
    "np_sp_onset",
    "np_variance_closed_form",
    "parse_config",
    "photon_fluctuation",
    "point_fluctuations",
    "reduced_cavity",
    "rhs_array",
    "run_sweep",
    "semiclassical_rhs",
    "spectrum_and_verdict",
    "spin_norm",
    "steady_state",
    "time_evolve",
    "wigner",
    "wigner_cavity",
    "z_branches",
]
