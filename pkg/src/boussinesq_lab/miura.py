"""Miura maps from the modified Boussinesq fields (p, q) to Boussinesq fields."""

from __future__ import annotations

import enum

import numpy as np

from .errors import MismatchedGridsError
from .spectral import FieldState, check_finite, spectral_derivative


class MiuraVariant(enum.Enum):
    UV = "UV"   # u = 3/4 - (2 p_x + 3 q^2 + p^2), v
    UW = "UW"   # u = -p_x - p^2/2 - (3/2) q^2, w


def miura_transform(state: FieldState, variant: MiuraVariant | str = MiuraVariant.UW) -> FieldState:
    """Map an MB snapshot to the (u, v) or (u, w) Boussinesq variables."""
    variant = MiuraVariant(variant)
    if state.system != "MB":
        raise ValueError("miura_transform needs an MB state")
    g = state.grid
    p, q = state.field_a, state.field_b
    check_finite(p, q)
    px = spectral_derivative(p, g, 1)
    qx = spectral_derivative(q, g, 1)
    qxx = spectral_derivative(q, g, 2)
    if variant is MiuraVariant.UV:
        u = 0.75 - (2 * px + 3 * q**2 + p**2)
        b = -2 * (qxx + 3 * p * qx + q * px + 2 * q * (p**2 - q**2))
    else:
        u = -px - 0.5 * p**2 - 1.5 * q**2
        b = -qxx - 3 * p * qx - q * px - 2 * q * p**2 + 2 * q**3
    return FieldState(g, state.t, u, b, "GB")


def gb_residual(state: FieldState, state_next: FieldState) -> float:
    """Max-norm residual of the good Boussinesq system between two snapshots.

    Time derivatives are forward differences; spatial terms are evaluated
    spectrally on the midpoint average, so the residual is O(dt^2).
    """
    if state.grid != state_next.grid or state.system != "GB" or state_next.system != "GB":
        raise MismatchedGridsError()
    dt = state_next.t - state.t
    if not dt > 0:
        raise ValueError("state_next must be later than state")
    g = state.grid
    u0, w0 = state.field_a, state.field_b
    u1, w1 = state_next.field_a, state_next.field_b
    check_finite(u0, w0, u1, w1)
    um, wm = 0.5 * (u0 + u1), 0.5 * (w0 + w1)
    ru = (u1 - u0) / dt - spectral_derivative(wm, g, 1)
    rw = ((w1 - w0) / dt + (4.0 / 3.0) * spectral_derivative(um**2, g, 1)
          + spectral_derivative(um, g, 3) / 3.0)
    return float(max(np.max(np.abs(ru)), np.max(np.abs(rw))))
