"""Parameter and state containers used by every other module.

Unit convention: all rates and detunings are angular frequencies in rad/us,
numerically equal to the MHz values used throughout (kappa = 0.5, delta = 5,
and so on). Time is in microseconds and hbar = 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDetuning, UnequalDetunings


@dataclass(frozen=True)
class ModelParams:
    """Physical rates, detunings and atom number for one run.

    delta_c   cavity detuning
    delta_a   atomic detuning
    coupling  collective atom-cavity coupling (the per-run lambda)
    g_drive   two-photon drive strength G of the a^2 + adag^2 term
    kappa     cavity amplitude decay rate (photon number decays at 2 kappa)
    gamma     collective atomic decay rate; ignored by the semiclassical
              modules, used only by the exact finite-N solver
    n_atoms   number of two-level atoms
    """

    delta_c: float
    delta_a: float
    coupling: float
    g_drive: float
    kappa: float
    gamma: float = 0.001
    n_atoms: int = 4

    def __post_init__(self):
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("decay rates must be non-negative")
        if self.coupling < 0 or self.g_drive < 0:
            raise ValueError("coupling and g_drive must be non-negative")
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ValueError("n_atoms must be a positive integer")

    def replace(self, **kw) -> "ModelParams":
        data = {
            "delta_c": self.delta_c,
            "delta_a": self.delta_a,
            "coupling": self.coupling,
            "g_drive": self.g_drive,
            "kappa": self.kappa,
            "gamma": self.gamma,
            "n_atoms": self.n_atoms,
        }
        data.update(kw)
        return ModelParams(**data)

    def max_rate(self) -> float:
        return max(abs(self.delta_c), abs(self.delta_a), self.coupling,
                   self.g_drive, self.kappa)


def meanfield_detuning(params: ModelParams) -> float:
    """Common detuning for the closed-form analysis.

    The analytic steady-state solution exists only for equal, nonzero
    detunings, so both conditions are enforced here.
    """
    if params.delta_c != params.delta_a:
        raise UnequalDetunings(
            f"mean-field analysis needs delta_c == delta_a, "
            f"got {params.delta_c} and {params.delta_a}")
    if params.delta_c == 0.0:
        raise DegenerateDetuning("mean-field analysis needs a nonzero detuning")
    return params.delta_c


@dataclass(frozen=True)
class SemiclassicalState:
    """One mean-field configuration.

    Scaling: <a> = sqrt(N) (alpha_re + i alpha_im) and <S_beta> = N beta for
    beta in {x, y, z}. On the physical spin shell x^2 + y^2 + z^2 = 1/4.
    """

    alpha_re: float
    alpha_im: float
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha_re, self.alpha_im, self.x, self.y, self.z])

    @classmethod
    def from_array(cls, arr) -> "SemiclassicalState":
        a = np.asarray(arr, dtype=float)
        return cls(a[0], a[1], a[2], a[3], a[4])

    @classmethod
    def normal_phase(cls, inverted: bool = False) -> "SemiclassicalState":
        return cls(0.0, 0.0, 0.0, 0.0, 0.5 if inverted else -0.5)

    def field_abs(self) -> float:
        return math.hypot(self.alpha_re, self.alpha_im)


class BranchLabel(enum.Enum):
    NP_DOWN = "np_down"
    NP_UP = "np_up"
    SP_PLUS_POS = "sp_plus_pos"
    SP_PLUS_NEG = "sp_plus_neg"
    SP_MINUS_POS = "sp_minus_pos"
    SP_MINUS_NEG = "sp_minus_neg"

    @property
    def is_superradiant(self) -> bool:
        return self in (BranchLabel.SP_PLUS_POS, BranchLabel.SP_PLUS_NEG,
                        BranchLabel.SP_MINUS_POS, BranchLabel.SP_MINUS_NEG)

    @property
    def is_plus_branch(self) -> bool:
        return self in (BranchLabel.SP_PLUS_POS, BranchLabel.SP_PLUS_NEG)


ALL_BRANCHES = (
    BranchLabel.NP_DOWN,
    BranchLabel.NP_UP,
    BranchLabel.SP_PLUS_POS,
    BranchLabel.SP_PLUS_NEG,
    BranchLabel.SP_MINUS_POS,
    BranchLabel.SP_MINUS_NEG,
)


class PhaseLabel(enum.Enum):
    NORMAL = "normal"
    SUPERRADIANT = "superradiant"
    COEXISTENCE = "coexistence"


@dataclass(frozen=True)
class PhaseResult:
    label: PhaseLabel
    n_stable: int


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of the eigenvalue test on a drift matrix.

    stable    all tested eigenvalues have real part below -eps
    marginal  the largest tested real part sits within +-eps of zero;
              marginal points count as unstable for phase classification
              but are reported distinctly
    """

    max_real_part: float
    stable: bool
    marginal: bool


@dataclass(frozen=True)
class FixedPoint:
    state: SemiclassicalState
    branch: BranchLabel
    stable: bool
    marginal: bool
    spectrum: tuple
    max_real_part: float
