"""Riemann-Hilbert scaffolding of the mB problem: phases, jump matrices,
Plemelj delta functions and the Painleve IV model-problem jumps.

omega = exp(2 pi i/3) throughout. Rays of the k-contour sit at angles
0, pi/3, ..., 5pi/3 (rays 1..6); rays of the model lambda-contour sit at
pi/6, pi/2, ..., 11pi/6.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import BranchCutError, ConstraintViolation, OffRayError
from .special import log0

OMEGA = cmath.exp(2j * math.pi / 3)
SQRT3 = math.sqrt(3.0)

A_SYM = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
B_SYM = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)


# --- phases -----------------------------------------------------------------

@dataclass(frozen=True)
class PhaseId:
    i: int
    j: int

    def __post_init__(self):
        if (self.i, self.j) not in ((2, 1), (3, 1), (3, 2)):
            raise ValueError("phase index must be one of (2,1), (3,1), (3,2)")

    @property
    def coefficients(self) -> tuple[complex, complex]:
        """(a, b) with Phi = a k zeta + b k^2."""
        return (OMEGA**self.i - OMEGA**self.j, OMEGA ** (2 * self.i) - OMEGA ** (2 * self.j))


def phase(pid: PhaseId, zeta: float, k: complex) -> complex:
    a, b = pid.coefficients
    return a * k * zeta + b * k * k


def phase_derivative(pid: PhaseId, zeta: float, k: complex) -> complex:
    a, b = pid.coefficients
    return a * zeta + 2 * b * k


def saddle(pid: PhaseId, zeta: float) -> complex:
    """Critical point of phase(pid, zeta, .); zeta/2, omega zeta/2, omega^2 zeta/2."""
    a, b = pid.coefficients
    return -a * zeta / (2 * b)


def vartheta(i: int, j: int, x: float, t: float, k: complex) -> complex:
    return (OMEGA**i - OMEGA**j) * k * x + (OMEGA ** (2 * i) - OMEGA ** (2 * j)) * k * k * t


# --- reflection data --------------------------------------------------------

@dataclass(frozen=True)
class ReflectionSamples:
    """Reflection coefficients r1 on (0, inf) and r2 on (-inf, 0).

    ``sup_r1``/``sup_r2`` are the sup-norm bounds (< 1); ``cutoff`` is a
    radius beyond which both functions are negligible in double precision.
    """

    r1: Callable[[float], complex]
    r2: Callable[[float], complex]
    sup_r1: float
    sup_r2: float
    cutoff: float = math.inf
    name: str = "custom"

    def __post_init__(self):
        if not (0 <= self.sup_r1 < 1 and 0 <= self.sup_r2 < 1):
            raise ValueError("reflection coefficients must satisfy |r| < 1")

    @classmethod
    def zero(cls) -> "ReflectionSamples":
        return cls(lambda s: 0j, lambda s: 0j, 0.0, 0.0, 1.0, "zero")

    @classmethod
    def gaussian(cls, amplitude: float, width: float = 1.0, chirp: float = 0.5) -> "ReflectionSamples":
        """r(s) = amplitude exp(-(s/width)^2 + i chirp s) on both half-lines."""
        if not 0 <= amplitude < 1:
            raise ValueError("amplitude violates |r| < 1")
        if not width > 0:
            raise ValueError("width must be positive")

        def r(s):
            return amplitude * cmath.exp(-(s / width) ** 2 + 1j * chirp * s)
        return cls(r, r, amplitude, amplitude, 28.0 * width, f"gaussian({amplitude:g})")

    @classmethod
    def bump(cls, amplitude: float, support: float = 2.0) -> "ReflectionSamples":
        """Smooth compactly supported r(s) = amplitude exp(1 - 1/(1 - (s/support)^2))."""
        if not 0 <= amplitude < 1:
            raise ValueError("amplitude violates |r| < 1")
        if not support > 0:
            raise ValueError("support must be positive")

        def r(s):
            z = (s / support) ** 2
            return complex(amplitude * math.exp(1.0 - 1.0 / (1.0 - z))) if z < 1 else 0j
        return cls(r, r, amplitude, amplitude, float(support), f"bump({amplitude:g})")


PRESETS = {
    "zero": lambda amplitude=0.0: ReflectionSamples.zero(),
    "gaussian": ReflectionSamples.gaussian,
    "bump": ReflectionSamples.bump,
}


# --- jump matrices ----------------------------------------------------------

@dataclass(frozen=True)
class JumpMatrix:
    index: int
    entries: np.ndarray

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))


RAY_ANGLES = tuple(m * math.pi / 3 for m in range(6))


def _on_ray(ray: int, k: complex, tol: float = 1e-12) -> float:
    """Radius of k if it lies on the given ray, else OffRayError."""
    if ray not in range(1, 7):
        raise ValueError("ray must be in 1..6")
    k = complex(k)
    rho = abs(k)
    if rho == 0:
        raise OffRayError(ray, k)
    d = k * cmath.exp(-1j * RAY_ANGLES[ray - 1])
    if abs(d.imag) > tol * rho or d.real <= 0:
        raise OffRayError(ray, k)
    return rho


def build_jump(ray: int, x: float, t: float, k: complex, refl: ReflectionSamples) -> JumpMatrix:
    """Jump matrix of the mB problem on ray 1..6 at the point k of that ray."""
    rho = _on_ray(ray, k)
    k = complex(k)
    v = np.eye(3, dtype=complex)
    if ray == 1:
        r = complex(refl.r1(rho))
        e = cmath.exp(vartheta(2, 1, x, t, k))
        v[0, 1], v[1, 0], v[1, 1] = -r / e, r.conjugate() * e, 1 - abs(r) ** 2
    elif ray == 2:
        r = complex(refl.r2(-rho))           # omega k on (-inf, 0)
        e = cmath.exp(vartheta(3, 2, x, t, k))
        v[1, 1], v[1, 2], v[2, 1] = 1 - abs(r) ** 2, -r.conjugate() / e, r * e
    elif ray == 3:
        r = complex(refl.r1(rho))           # omega^2 k on (0, inf)
        e = cmath.exp(vartheta(3, 1, x, t, k))
        v[0, 0], v[0, 2], v[2, 0] = 1 - abs(r) ** 2, r.conjugate() / e, -r * e
    elif ray == 4:
        r = complex(refl.r2(-rho))
        e = cmath.exp(vartheta(2, 1, x, t, k))
        v[0, 0], v[0, 1], v[1, 0] = 1 - abs(r) ** 2, -r.conjugate() / e, r * e
    elif ray == 5:
        r = complex(refl.r1(rho))           # omega k on (0, inf)
        e = cmath.exp(vartheta(3, 2, x, t, k))
        v[1, 2], v[2, 1], v[2, 2] = -r / e, r.conjugate() * e, 1 - abs(r) ** 2
    else:
        # r2 e^{-vartheta31} couples components 1 and 3, so it sits in
        # entry (1, 3); this is the placement that keeps det v6 = 1
        r = complex(refl.r2(-rho))          # omega^2 k on (-inf, 0)
        e = cmath.exp(vartheta(3, 1, x, t, k))
        v[0, 2], v[2, 0], v[2, 2] = r / e, -r.conjugate() * e, 1 - abs(r) ** 2
    return JumpMatrix(ray, v)


def v4_factors(x: float, t: float, k: complex, refl: ReflectionSamples,
               analytic_fraction: float = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(U, R, L) with v4 = U R L, splitting r2 = r_a + r_r as
    r_a = analytic_fraction * r2, r_r = (1 - analytic_fraction) * r2.

    analytic_fraction = 1 is the exact-split limit (remainder zero).
    """
    rho = _on_ray(4, k)
    r2 = complex(refl.r2(-rho))
    ra = analytic_fraction * r2
    rr = r2 - ra
    e = cmath.exp(vartheta(2, 1, x, t, complex(k)))
    U = np.eye(3, dtype=complex)
    L = np.eye(3, dtype=complex)
    R = np.eye(3, dtype=complex)
    U[0, 1] = -ra.conjugate() / e
    L[1, 0] = ra * e
    R[0, 0], R[0, 1], R[1, 0] = 1 - rr * rr.conjugate(), -rr.conjugate() / e, rr * e
    return U, R, L


# --- delta functions --------------------------------------------------------

def nu(refl: ReflectionSamples) -> float:
    return -math.log1p(-abs(complex(refl.r1(0.0))) ** 2) / (2.0 * math.pi)


def _log1m(refl: ReflectionSamples):
    def f(s):
        return math.log1p(-abs(complex(refl.r1(s))) ** 2)
    return f


def _cauchy_exponent(k: complex, refl: ReflectionSamples, quad_tol: float) -> complex:
    """(1/(2 pi i)) int_0^inf ln(1 - |r1(s)|^2)/(s - k) ds.

    The value and a difference-quotient slope of the integrand at
    s0 = max(Re k, 0) are subtracted and integrated in closed form, which
    keeps the remainder bounded as k approaches the cut.
    """
    f = _log1m(refl)
    s0 = max(k.real, 0.0)
    f0 = f(s0)
    finite = math.isfinite(refl.cutoff)
    B = max(refl.cutoff, 2.0 * abs(k) + 1.0) if finite else max(2.0 * abs(k) + 1.0, 10.0)
    slope = 0.0
    if s0 > 0:
        h = 1e-4 * min(s0, 1.0)
        slope = (f(s0 + h) - f(s0 - h)) / (2 * h)

    def g(s):
        return (f(s) - f0 - slope * (s - s0)) / (s - k)
    # near the cut the integrand varies on the scale |Im k| around s0
    eps = abs(k.imag)
    pts = sorted({p for p in (s0, *(s0 + m * eps for m in (-100, -10, -1, 1, 10, 100)))
                  if 0 < p < B})
    opts = dict(epsabs=quad_tol * 1e-2, epsrel=quad_tol * 1e-2, limit=400, complex_func=True)
    main, _ = quad(g, 0.0, B, points=pts or None, **opts)
    log_span = cmath.log(B - k) - cmath.log(-k)
    total = main + f0 * log_span + slope * (B + (k - s0) * log_span)
    if not finite:
        tail, _ = quad(lambda s: f(s) / (s - k), B, math.inf, **opts)
        total += tail
    return total / (2j * math.pi)


def _check_tol(quad_tol: float) -> None:
    if not 1e-12 <= quad_tol <= 1e-6:
        raise ValueError("quad_tol must lie in [1e-12, 1e-6]")


def delta1(k: complex, refl: ReflectionSamples, quad_tol: float = 1e-10) -> complex:
    """delta1(k) = exp((1/(2 pi i)) int_0^inf ln(1 - |r1(s)|^2)/(s - k) ds)."""
    _check_tol(quad_tol)
    k = complex(k)
    if k.imag == 0 and k.real >= 0:
        raise BranchCutError(k)
    return cmath.exp(_cauchy_exponent(k, refl, quad_tol))


def chi1(k: complex, refl: ReflectionSamples, quad_tol: float = 1e-10) -> complex:
    """chi1 in delta1(k) = exp(-i nu log0(k)) exp(-chi1(k)); chi1(0) is the
    non-tangential limit."""
    _check_tol(quad_tol)
    k = complex(k)
    if k == 0:
        f = _log1m(refl)
        f0 = f(0.0)
        finite = math.isfinite(refl.cutoff)
        B = refl.cutoff if finite else 10.0
        opts = dict(epsabs=quad_tol * 1e-2, epsrel=quad_tol * 1e-2, limit=400)
        main, _ = quad(lambda s: (f(s) - f0) / s if s > 0 else 0.0, 0.0, B, **opts)
        total = main + f0 * math.log(B)
        if not finite:
            total += quad(lambda s: f(s) / s, B, math.inf, **opts)[0]
        return -total / (2j * math.pi) - f0 / 2.0
    if k.imag == 0 and k.real > 0:
        raise BranchCutError(k)
    return -_cauchy_exponent(k, refl, quad_tol) - 1j * nu(refl) * log0(k)


def delta1_split(k: complex, refl: ReflectionSamples, quad_tol: float = 1e-10) -> complex:
    """delta1 assembled as exp(-i nu log0(k)) exp(-chi1(k))."""
    return cmath.exp(-1j * nu(refl) * log0(k) - chi1(k, refl, quad_tol))


def _off_cuts(k: complex) -> None:
    for rot in (1.0, OMEGA**2, OMEGA):
        z = rot * k
        if abs(z.imag) <= 1e-15 * abs(z) and z.real >= 0:
            raise BranchCutError(k)


def delta_matrix(k: complex, refl: ReflectionSamples, quad_tol: float = 1e-10) -> np.ndarray:
    """diag(delta1/delta3, delta5/delta1, delta3/delta5) with
    delta3(k) = delta1(omega^2 k) and delta5(k) = delta1(omega k)."""
    k = complex(k)
    _off_cuts(k)
    d1 = delta1(k, refl, quad_tol)
    d3 = delta1(OMEGA**2 * k, refl, quad_tol)
    d5 = delta1(OMEGA * k, refl, quad_tol)
    return np.diag([d1 / d3, d5 / d1, d3 / d5])


# --- model problem ----------------------------------------------------------

J_DIAG = np.array([OMEGA, OMEGA**2, 1.0], dtype=complex)

_S_PATTERNS = {
    1: {(1, 0): 0, (1, 2): 2},
    2: {(2, 0): 1, (2, 1): 3},
    3: {(0, 1): 2, (0, 2): 0},
    4: {(1, 0): 3, (1, 2): 1},
    5: {(2, 0): 2, (2, 1): 0},
    6: {(0, 1): 1, (0, 2): 3},
}


@dataclass(frozen=True)
class ModelJumpData:
    s1: complex
    s2: complex
    s3: complex
    s4: complex

    @property
    def s(self) -> tuple[complex, complex, complex, complex]:
        return (self.s1, self.s2, self.s3, self.s4)

    @classmethod
    def from_reflection(cls, r1_0: complex, r2_0: complex) -> "ModelJumpData":
        s1 = complex(r1_0).conjugate()
        s3 = -complex(r2_0).conjugate()
        return cls(s1, -s1.conjugate(), s3, -s3.conjugate())

    @classmethod
    def from_r1(cls, r1_0: complex) -> "ModelJumpData":
        """Data with r2(0) fixed by the closure constraint."""
        c = complex(r1_0)
        den = 1.0 - abs(c) ** 2
        if den <= 0:
            raise ValueError("need |r1(0)| < 1")
        r2_0 = (c * c - c.conjugate()) / den
        return cls.from_reflection(c, r2_0)

    def constraint_defect(self) -> float:
        s1, s2, s3, s4 = self.s
        return max(abs(s4 + s1 + s2 * s3), abs(s3 + s2 + s1 * s1 + s1 * s2 * s3))

    def symmetry_defect(self) -> float:
        return max(abs(self.s2 + self.s1.conjugate()), abs(self.s4 + self.s3.conjugate()))


def _conjugation(y: float, lam: complex) -> np.ndarray:
    X = 3.0 * y * lam * J_DIAG + 6.75 * lam * lam * J_DIAG**2
    return X[:, None] - X[None, :]


def _model_core(data: ModelJumpData, j: int) -> np.ndarray:
    m = np.eye(3, dtype=complex)
    for (a, b), idx in _S_PATTERNS[j].items():
        m[a, b] = data.s[idx]
    return m


def model_jumps(data: ModelJumpData, y: float, lam: complex, check: bool = True) -> list[JumpMatrix]:
    """The fifteen model-problem jumps e^{X-hat} S_j, X = 3 y lam J + (27/4) lam^2 J^2."""
    if check and data.constraint_defect() > 1e-12:
        raise ConstraintViolation(f"constraint violated (defect {data.constraint_defect():.3e})")
    lam = complex(lam)
    with np.errstate(over="ignore", invalid="ignore"):
        factor = np.exp(_conjugation(y, lam))
    core = {j: _model_core(data, j) * factor for j in range(1, 7)}
    out = [JumpMatrix(j, core[j]) for j in range(1, 7)]
    out += [JumpMatrix(j, np.eye(3, dtype=complex)) for j in range(7, 13)]
    out.append(JumpMatrix(13, core[6] @ core[1]))
    out.append(JumpMatrix(14, core[2] @ core[3]))
    out.append(JumpMatrix(15, core[4] @ core[5]))
    return out


def hexagon_product(data: ModelJumpData, y: float = 0.0, lam: complex = 0.0, check: bool = True) -> np.ndarray:
    mats = model_jumps(data, y, lam, check)
    prod = np.eye(3, dtype=complex)
    for m in mats[:6]:
        prod = prod @ m.entries
    return prod


def symmetry_defects(data: ModelJumpData, y: float, lam: complex) -> tuple[float, float]:
    """(Z3, Z2) defects of the model jumps at lam.

    Z3: v_j(lam) = A v_{j+2}(omega lam) A^{-1}.
    Z2: v_j(lam) = B conj(v_{j'}(conj lam))^{-1} B with j' = 7 - j.
    """
    lam = complex(lam)
    here = model_jumps(data, y, lam, check=False)
    rot = model_jumps(data, y, OMEGA * lam, check=False)
    ref = model_jumps(data, y, lam.conjugate(), check=False)
    Ainv = np.linalg.inv(A_SYM)
    z3 = z2 = 0.0
    for j in range(1, 7):
        v = here[j - 1].entries
        w = rot[(j + 1) % 6].entries
        z3 = max(z3, float(np.max(np.abs(v - A_SYM @ w @ Ainv))))
        u = ref[6 - j].entries
        z2 = max(z2, float(np.max(np.abs(v - B_SYM @ np.linalg.inv(u.conj()) @ B_SYM))))
    return z3, z2


def symmetry_check(data: ModelJumpData, y: float, lam: complex) -> float:
    """Max-norm defect of the Z3 and Z2 conjugation identities."""
    return max(symmetry_defects(data, y, lam))
