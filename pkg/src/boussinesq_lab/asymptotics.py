"""Region classification and the closed-form long-time asymptotic formulas.

Painleve-type leading orders use y = -sqrt3 x / (2 sqrt t); the dispersive
formula uses the stationary point k0 = x/(2t) and tau = t k0^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .painleve import IKParams, PainleveSolution, its_kapaev_eval, similarity_variable
from .special import arg_gamma

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class RegionConstants:
    c1: float = 2.0
    c2: float = 1.0
    c3: float = 0.25

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0 and self.c3 > 0):
            raise ValueError("region constants must be positive")

    def boundaries(self, t: float) -> tuple[float, float, float]:
        """|x| at the three region boundaries at time t."""
        return self.c1 * math.sqrt(t), self.c2 * t**0.75, self.c3 * t


class RegionLabel(enum.Enum):
    PAINLEVE = "Painleve"
    TRANSITION_I = "TransitionI"
    TRANSITION_II = "TransitionII"
    DISPERSIVE = "Dispersive"


_ORDER = list(RegionLabel)


def classify_region(x: float, t: float, rc: RegionConstants = RegionConstants()) -> RegionLabel:
    """Region of (x, t); boundary points go to the region with smaller |x|,
    except |x| = c1 sqrt(t), which opens Transition I."""
    if not t > 0:
        raise ValueError("t must be positive")
    ax = abs(x)
    b1, b2, b3 = rc.boundaries(t)
    if ax < b1:
        return RegionLabel.PAINLEVE
    if ax <= b2:
        return RegionLabel.TRANSITION_I
    if ax <= b3:
        return RegionLabel.TRANSITION_II
    return RegionLabel.DISPERSIVE


def error_band(region: RegionLabel, x: float, t: float, system: str = "MB") -> float:
    """Scale of the printed error order at (x, t), without constants."""
    if not t > 0:
        raise ValueError("t must be positive")
    region = RegionLabel(region)
    if region is RegionLabel.PAINLEVE:
        return t**-1.5 if system == "GB" else 1.0 / t
    if region is RegionLabel.TRANSITION_I:
        tau = x * x / (4.0 * t)
        return math.sqrt(tau) / t
    if region is RegionLabel.TRANSITION_II:
        return 1.0 / (t * abs(x) / (2.0 * t))
    return math.log(t) / t


def _y_and_fields(x, t, sol: PainleveSolution):
    if not t > 0:
        raise ValueError("t must be positive")
    y = similarity_variable(x, t)
    P, dP = sol.interpolate(y)
    return y, P, dP


def eval_mb_painleve(x, t: float, sol: PainleveSolution):
    """Leading-order (p, q) of the mB solution in the Painleve region."""
    y, P, _ = _y_and_fields(x, t, sol)
    ratio = sol.interpolate_ratio(y)
    s = SQRT3 / (4.0 * math.sqrt(t))
    p, q = s * ratio, s * (P + 2.0 * y / 3.0)
    if np.ndim(x) == 0:
        return float(p), float(q)
    return p, q


def eval_gb_painleve(x, t: float, sol: PainleveSolution):
    """Leading-order u of the good Boussinesq solution in the Painleve region.

    (3P' + 2)^2 / P^2 is evaluated as 9 ((P' + 2/3)/P)^2 so that simple zeros
    of P cause no cancellation.
    """
    y, P, _ = _y_and_fields(x, t, sol)
    ratio = sol.interpolate_ratio(y)
    u = -(9.0 * ratio**2 - 9.0 * P**2 - 36.0 * y * P - 20.0 * y**2) / (32.0 * t)
    return float(u) if np.ndim(x) == 0 else u


@dataclass(frozen=True)
class ScatteringParams:
    r1_at_k0: complex
    nu1: float
    theta1: float = 0.0
    s_minus: complex = 0j

    def __post_init__(self):
        if not abs(self.r1_at_k0) < 1 or not abs(self.s_minus) < 1:
            raise ValueError("reflection data must satisfy |r| < 1")
        if not self.nu1 >= 0:
            raise ValueError("nu1 must be non-negative")

    @classmethod
    def from_r1(cls, r1: complex, theta1: float = 0.0) -> "ScatteringParams":
        r1 = complex(r1)
        if not abs(r1) < 1:
            raise ValueError("reflection data must satisfy |r| < 1")
        nu1 = -math.log1p(-abs(r1) ** 2) / (2.0 * math.pi)
        return cls(r1, nu1, theta1, r1.conjugate())


def _dispersive_phase(k0: float, t: float, sp: ScatteringParams) -> float:
    r = complex(sp.r1_at_k0)
    arg_r = math.atan2(r.imag, r.real) if r != 0 else 0.0
    nu = sp.nu1
    arg_g = arg_gamma(1j * nu) if nu > 0 else 0.0
    return (5.0 * math.pi / 12.0 + arg_r + arg_g + SQRT3 * k0 * k0 * t
            - nu * math.log(6.0 * SQRT3 * k0 * k0 * t) - sp.theta1)


def eval_mb_dispersive(x: float, t: float, sp: ScatteringParams) -> tuple[float, float]:
    """Leading-order (p, q) in the dispersive-wave region, x > 0 only."""
    if not t > 0:
        raise ValueError("t must be positive")
    if not x > 0:
        raise ValueError("dispersive formula is only available for x > 0")
    k0 = x / (2.0 * t)
    if sp.nu1 == 0:
        return 0.0, 0.0
    A = _dispersive_phase(k0, t, sp)
    amp = math.sqrt(sp.nu1) / math.sqrt(2.0 * t)
    return 3**0.75 * amp * math.cos(A), -(3**0.25) * amp * math.sin(A)


def q_transition_leading(x: float, t: float, s_minus: complex) -> float:
    """q from the Painleve leading order with the y -> -infinity asymptotics
    of the transcendent substituted (x > 0)."""
    ik = IKParams.from_s_minus(s_minus)
    y = float(similarity_variable(x, t))
    return SQRT3 / (4.0 * math.sqrt(t)) * (its_kapaev_eval(y, ik) + 2.0 * y / 3.0)


def matching_discrepancy(k0: float, t: float, sp: ScatteringParams) -> float:
    """|q_transition - q_dispersive| at x = 2 k0 t with s_minus = conj(r1(k0)).

    theta1 is forced to 0 in the dispersive side.
    """
    if not (k0 > 0 and t > 0):
        raise ValueError("k0 and t must be positive")
    x = 2.0 * k0 * t
    s_minus = complex(sp.r1_at_k0).conjugate()
    q_pt = q_transition_leading(x, t, s_minus)
    sp0 = ScatteringParams(sp.r1_at_k0, sp.nu1, 0.0, s_minus)
    q_ds = eval_mb_dispersive(x, t, sp0)[1]
    return abs(q_pt - q_ds)
