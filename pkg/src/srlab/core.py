"""Semiclassical equations of motion and the conserved spin norm.

The scaled variables make the equations independent of the atom number:
<a> = sqrt(N) (alpha_re + i alpha_im), <S_beta> = N beta. Atomic decay is
dropped here on purpose; the semiclassical analysis is a gamma = 0 theory
and only the exact finite-N solver carries gamma.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .params import ModelParams, SemiclassicalState


def semiclassical_rhs(state: SemiclassicalState, params: ModelParams) -> np.ndarray:
    """Time derivatives (d alpha_re, d alpha_im, dx, dy, dz)."""
    return kernels.rhs5(state.as_array(), params.delta_c, params.delta_a,
                        params.coupling, params.g_drive, params.kappa)


def rhs_array(y: np.ndarray, params: ModelParams) -> np.ndarray:
    """Same as semiclassical_rhs but on a bare 5-vector; used in hot loops."""
    return kernels.rhs5(y, params.delta_c, params.delta_a,
                        params.coupling, params.g_drive, params.kappa)


def spin_norm(state: SemiclassicalState) -> float:
    """The conserved quantity x^2 + y^2 + z^2; equals 1/4 on the physical shell."""
    return state.x ** 2 + state.y ** 2 + state.z ** 2
