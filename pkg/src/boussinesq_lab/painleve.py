"""Painleve IV transcendents: equation residuals, pole-aware integration,
Its-Kapaev seeding, and extraction of the transcendent from mB snapshots.

The equation is

    P'' = P'^2/(2P) + (3/2) P^3 + 4 y P^2 + (2 y^2 - 4 alpha + beta) P - beta^2/(2P)

and the mB/Boussinesq long-time problem uses alpha = -1/6, beta = -2/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.optimize import least_squares

from .errors import (DegenerateDenominator, OutOfRangeError, PoleError,
                     ToleranceFailure, WindowEmptyError)
from .spectral import FieldState, spectral_derivative
from .special import arg_gamma

SQRT3 = math.sqrt(3.0)
POLE_BIG = 1e8
POLE_SMALL = 1e-10
_SWITCH = 1e3


@dataclass(frozen=True)
class PIVParams:
    alpha: float = -1.0 / 6.0
    beta: float = -2.0 / 3.0


DEFAULT_PARAMS = PIVParams()


@dataclass(frozen=True)
class PainleveSolution:
    """Samples of P and P' on a strictly increasing y grid.

    ``ratio`` optionally carries (P' - beta)/P evaluated without cancellation;
    the integrator fills it in, which keeps the p-asymptotics finite across
    simple zeros of P.
    """

    y: np.ndarray
    P: np.ndarray
    dP: np.ndarray
    params: PIVParams = DEFAULT_PARAMS
    ratio: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        P = np.asarray(self.P, dtype=float)
        dP = np.asarray(self.dP, dtype=float)
        if not (y.ndim == 1 and y.shape == P.shape == dP.shape):
            raise ValueError("y, P, dP must be 1-d arrays of equal length")
        if y.size < 2:
            raise ValueError("need at least two samples")
        if np.any(np.diff(y) <= 0):
            raise ValueError("y must be strictly increasing")
        if not (np.all(np.isfinite(P)) and np.all(np.isfinite(dP))):
            raise ValueError("P and dP must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "dP", dP)
        if self.ratio is not None:
            object.__setattr__(self, "ratio", np.asarray(self.ratio, dtype=float))

    @property
    def span(self) -> tuple[float, float]:
        return float(self.y[0]), float(self.y[-1])

    def restrict(self, lo: float, hi: float) -> "PainleveSolution":
        m = (self.y >= lo) & (self.y <= hi)
        return PainleveSolution(self.y[m], self.P[m], self.dP[m], self.params,
                                None if self.ratio is None else self.ratio[m])

    def interpolate(self, yq) -> tuple[np.ndarray, np.ndarray]:
        """(P, P') at yq; P by cubic Hermite, P' by a cubic spline."""
        yq = np.asarray(yq, dtype=float)
        lo, hi = self.span
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(yq < lo - slack) or np.any(yq > hi + slack):
            raise OutOfRangeError("y out of range")
        yq = np.clip(yq, lo, hi)
        P = CubicHermiteSpline(self.y, self.P, self.dP)(yq)
        dP = CubicSpline(self.y, self.dP)(yq) if self.y.size > 2 else np.interp(yq, self.y, self.dP)
        return P, dP

    def interpolate_ratio(self, yq) -> np.ndarray:
        """(P' - beta)/P at yq, from the stored ratio when available."""
        if self.ratio is None:
            P, dP = self.interpolate(yq)
            if np.any(np.abs(P) < 1e-12):
                raise PoleError(float(np.atleast_1d(yq)[np.argmin(np.abs(P))]), "pole: P vanished")
            return (dP - self.params.beta) / P
        self.interpolate(yq)  # range check
        yq = np.clip(np.asarray(yq, dtype=float), *self.span)
        return CubicSpline(self.y, self.ratio)(yq) if self.y.size > 2 else np.interp(yq, self.y, self.ratio)

    def to_csv(self, path: str | Path) -> None:
        lines = [f"# alpha={self.params.alpha:.17g} beta={self.params.beta:.17g}", "y,P,dP"]
        lines += [f"{a:.17g},{b:.17g},{c:.17g}" for a, b, c in zip(self.y, self.P, self.dP)]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "PainleveSolution":
        text = Path(path).read_text().splitlines()
        meta = dict(tok.split("=", 1) for tok in text[0].lstrip("#").split())
        if text[1].strip() != "y,P,dP":
            raise ValueError(f"{path}: unexpected header {text[1]!r}")
        data = np.loadtxt(text[2:], delimiter=",", ndmin=2)
        params = PIVParams(float(meta["alpha"]), float(meta["beta"]))
        return cls(data[:, 0], data[:, 1], data[:, 2], params)


@dataclass(frozen=True)
class IKParams:
    """Data of the y -> -infinity oscillatory asymptotics around -2y/3."""

    a: float
    arg_s: float = 0.0
    params: PIVParams = DEFAULT_PARAMS

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError("amplitude a must be non-negative")

    @classmethod
    def from_s_minus(cls, s_minus: complex, params: PIVParams = DEFAULT_PARAMS) -> "IKParams":
        s_minus = complex(s_minus)
        if not abs(s_minus) < 1:
            raise ValueError("|s_minus| must be < 1")
        a2 = -math.log1p(-abs(s_minus) ** 2) / (2.0 * SQRT3 * math.pi)
        arg = math.atan2(s_minus.imag, s_minus.real) if s_minus != 0 else 0.0
        return cls(math.sqrt(a2), arg, params)

    @property
    def phase0(self) -> float:
        p = self.params
        return (-0.75 * math.pi - (2.0 * math.pi / 3.0) * (p.alpha - p.beta)
                - arg_gamma(-1j * SQRT3 * self.a**2) - self.arg_s)


# --- equation and residuals -------------------------------------------------

def piv_rhs(y: float, P: float, dP: float, params: PIVParams = DEFAULT_PARAMS) -> float:
    """P'' from the Painleve IV equation."""
    if abs(P) < 1e-12:
        raise PoleError(y, "pole: P vanished")
    a, b = params.alpha, params.beta
    return (dP * dP / (2 * P) + 1.5 * P**3 + 4 * y * P**2
            + (2 * y * y - 4 * a + b) * P - b * b / (2 * P))


def _fd5_weights(x: np.ndarray, x0: float, m: int) -> np.ndarray:
    """Fornberg finite-difference weights for derivative ``m`` at ``x0``."""
    n = x.size
    c = np.zeros((n, m + 1))
    c1, c4 = 1.0, x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def fd_derivative(y: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Fourth-order first derivative on interior nodes (five-point stencils).

    Returns an array of length len(y) - 4 aligned with y[2:-2].
    """
    y = np.asarray(y, dtype=float)
    f = np.asarray(f)
    if y.size < 5:
        raise ValueError("need at least five samples")
    h = np.diff(y)
    if np.allclose(h, h[0], rtol=1e-9, atol=0):
        d = h[0]
        return (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * d)
    out = np.empty(y.size - 4, dtype=np.result_type(f, float))
    for i in range(2, y.size - 2):
        w = _fd5_weights(y[i - 2:i + 3], y[i], 1)
        out[i - 2] = w @ f[i - 2:i + 3]
    return out


def model_residual_values(sol: PainleveSolution) -> tuple[np.ndarray, np.ndarray]:
    """Interior nodes and the left-hand side of the alpha=-1/6, beta=-2/3 form

        -P''/P + P'^2/(2P^2) + 4yP + (3/2)P^2 - 2/(9P^2) + 2y^2

    with P'' from five-point differences of the P' samples.
    """
    y, P, dP = sol.y, sol.P, sol.dP
    d2P = fd_derivative(y, dP)
    yi, Pi, dPi = y[2:-2], P[2:-2], dP[2:-2]
    if np.any(np.abs(Pi) < 1e-12):
        j = int(np.argmin(np.abs(Pi)))
        raise PoleError(float(yi[j]), "pole: P vanished")
    res = (-d2P / Pi + (0.5 * dPi**2 - 2.0 / 9.0) / Pi**2
           + 4 * yi * Pi + 1.5 * Pi**2 + 2 * yi**2)
    return yi, res


def model_residual(sol: PainleveSolution) -> float:
    return float(np.max(np.abs(model_residual_values(sol)[1])))


def piv_residual(sol: PainleveSolution) -> float:
    """max |P''_fd - piv_rhs| over interior nodes, for any (alpha, beta)."""
    d2P = fd_derivative(sol.y, sol.dP)
    rhs = np.array([piv_rhs(y, P, dP, sol.params)
                    for y, P, dP in zip(sol.y[2:-2], sol.P[2:-2], sol.dP[2:-2])])
    return float(np.max(np.abs(d2P - rhs)))


def appendix_reduction_check(sol: PainleveSolution) -> tuple[float, float]:
    """Residuals of the complex phi2 equation and of the real (f, g) system

        phi2' - 9 conj(phi2)^2 + (2i y/sqrt3) phi2 = 0,
        18 f g + 2 y f/sqrt3 + g' = 0,   f' - 9 f^2 + 9 g^2 - 2 y g/sqrt3 = 0.

    g = -(P + 2y/3)/(6 sqrt3), f = -sqrt3 g'/(2(9 sqrt3 g + y)), phi2 = f + i g,
    with all y-derivatives taken by five-point finite differences.
    """
    y, P = sol.y, sol.P
    if y.size < 9:
        raise ValueError("need at least nine samples")
    g = -(P + 2.0 * y / 3.0) / (6.0 * SQRT3)
    dg = fd_derivative(y, g)
    yc, gc = y[2:-2], g[2:-2]
    den = 9.0 * SQRT3 * gc + yc
    if np.any(np.abs(den) < 1e-10):
        j = int(np.argmin(np.abs(den)))
        raise DegenerateDenominator(f"degenerate denominator at y={yc[j]:.12g}")
    f = -SQRT3 * dg / (2.0 * den)
    phi = f + 1j * gc
    dphi = fd_derivative(yc, phi)
    df = dphi.real
    ycc, fcc, gcc, phic = yc[2:-2], f[2:-2], gc[2:-2], phi[2:-2]
    dgc = dg[2:-2]
    # the coefficient 2i y/sqrt3 is the one whose real and imaginary parts
    # reproduce the (f, g) system below
    r_phi = dphi - 9.0 * np.conj(phic) ** 2 + (2j * ycc / SQRT3) * phic
    r1 = 18.0 * fcc * gcc + 2.0 * ycc * fcc / SQRT3 + dgc
    r2 = df - 9.0 * fcc**2 + 9.0 * gcc**2 - 2.0 * ycc * gcc / SQRT3
    return float(np.max(np.abs(r_phi))), float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))


# --- integration ------------------------------------------------------------

@dataclass
class _Segment:
    ya: float
    yb: float
    dense: object
    bs: float


def _regular_rhs(params: PIVParams, bs: float):
    a, b = params.alpha, params.beta
    c = -4 * a + b

    def rhs(y, z):
        P, h = z
        return [bs + P * h, -0.5 * h * h + 1.5 * P * P + 4 * y * P + 2 * y * y + c]
    return rhs


def integrate_ivp(y0: float, P0: float, dP0: float, y_end: float, tol: float = 1e-10,
                  params: PIVParams = DEFAULT_PARAMS, y_eval=None) -> PainleveSolution:
    """Adaptive DOP853 solution of Painleve IV from (y0, P0, P0') to y_end.

    The equation is integrated in the regular variables (P, h) with
    P' = s + P h and s = +-beta, which removes the 1/P terms; s flips when
    P approaches a zero whose slope is -s. Only genuine poles (|P| > 1e8) and,
    for beta = 0, zeros of P stop the integration (PoleError with location).

    Returns samples at the solver's steps, or at ``y_eval`` (dense output).
    """
    if not 1e-12 <= tol <= 1e-4:
        raise ValueError("tol must lie in [1e-12, 1e-4]")
    if abs(P0) < POLE_SMALL:
        raise PoleError(y0, "pole: P vanished")
    if y_end == y0:
        raise ValueError("empty integration interval")
    b = params.beta
    bs = b
    h = (dP0 - bs) / P0
    if b != 0 and abs(h) > _SWITCH / 10:
        bs = -b
        h = (dP0 - bs) / P0
    direction = 1.0 if y_end > y0 else -1.0
    segments: list[_Segment] = []
    ya, z = float(y0), [float(P0), float(h)]

    def pole_event(y, z):
        return abs(z[0]) - POLE_BIG
    pole_event.terminal = True

    def switch_event(y, z):
        return abs(z[1]) - _SWITCH
    switch_event.terminal = True

    while direction * (y_end - ya) > 0:
        out = solve_ivp(_regular_rhs(params, bs), (ya, y_end), z, method="DOP853",
                        rtol=tol, atol=tol, dense_output=True,
                        events=[pole_event, switch_event])
        if out.status == -1:
            raise ToleranceFailure(f"tolerance failure near y={out.t[-1]:.12g}: {out.message}")
        yb = float(out.t[-1])
        segments.append(_Segment(ya, yb, out.sol, bs))
        zb = out.y[:, -1]
        if out.status == 0:
            break
        if out.t_events[0].size:
            raise PoleError(yb)
        # switch event: |h| large
        P, hh = zb
        if abs(P) >= 1.0:
            raise PoleError(yb, "P and its log-derivative both blow up")
        if b == 0:
            raise PoleError(yb, "pole: P vanished")
        new_bs = -bs
        z = [P, hh + 2 * bs / P]
        bs = new_bs
        ya = yb
        if len(segments) > 10_000:
            raise ToleranceFailure("too many formulation switches")

    if y_eval is None:
        ys, Ps, hs, bss = [], [], [], []
        for seg in segments:
            tt = seg.dense.ts if hasattr(seg.dense, "ts") else np.array([seg.ya, seg.yb])
            vals = seg.dense(tt)
            ys.append(tt)
            Ps.append(vals[0])
            hs.append(vals[1])
            bss.append(np.full(tt.size, seg.bs))
        y_arr = np.concatenate(ys)
        P_arr, h_arr, bs_arr = np.concatenate(Ps), np.concatenate(hs), np.concatenate(bss)
        # drop duplicated junction nodes
        keep = np.concatenate([[True], np.abs(np.diff(y_arr)) > 0])
        y_arr, P_arr, h_arr, bs_arr = y_arr[keep], P_arr[keep], h_arr[keep], bs_arr[keep]
    else:
        y_arr = np.asarray(y_eval, dtype=float)
        lo, hi = sorted((float(y0), segments[-1].yb))
        if np.any(y_arr < lo - 1e-12) or np.any(y_arr > hi + 1e-12):
            raise OutOfRangeError("y_eval outside the integrated interval")
        P_arr = np.empty_like(y_arr)
        h_arr = np.empty_like(y_arr)
        bs_arr = np.empty_like(y_arr)
        for seg in segments:
            s_lo, s_hi = sorted((seg.ya, seg.yb))
            m = (y_arr >= s_lo - 1e-12) & (y_arr <= s_hi + 1e-12)
            if m.any():
                vals = seg.dense(y_arr[m])
                P_arr[m], h_arr[m], bs_arr[m] = vals[0], vals[1], seg.bs
    dP_arr = bs_arr + P_arr * h_arr
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bs_arr == b, h_arr, h_arr + (bs_arr - b) / P_arr)
    order = np.argsort(y_arr)
    y_arr, P_arr, dP_arr, ratio = y_arr[order], P_arr[order], dP_arr[order], ratio[order]
    small = np.abs(P_arr) < POLE_SMALL
    if small.any():
        raise PoleError(float(y_arr[small][0]), "pole: P vanished at a sample")
    return PainleveSolution(y_arr, P_arr, dP_arr, params,
                            ratio if np.all(np.isfinite(ratio)) else None)


# --- asymptotic seeding -----------------------------------------------------

def its_kapaev_theta(y, ik: IKParams):
    y = np.asarray(y, dtype=float)
    if ik.a == 0:
        return np.zeros_like(y)
    return y**2 / SQRT3 - SQRT3 * ik.a**2 * np.log(2 * SQRT3 * y**2) + ik.phase0


def its_kapaev_eval(y, ik: IKParams):
    """Two-term y -> -infinity asymptotics -2y/3 + 2 sqrt2 a cos(Theta)."""
    ya = np.asarray(y, dtype=float)
    if np.any(ya >= 0):
        raise ValueError("its_kapaev_eval needs y < 0")
    val = -2.0 * ya / 3.0
    if ik.a > 0:
        val = val + 2.0 * math.sqrt(2.0) * ik.a * np.cos(its_kapaev_theta(ya, ik))
    return float(val) if np.ndim(y) == 0 else val


def its_kapaev_deriv(y, ik: IKParams):
    """y-derivative of :func:`its_kapaev_eval`."""
    ya = np.asarray(y, dtype=float)
    if np.any(ya >= 0):
        raise ValueError("its_kapaev_deriv needs y < 0")
    val = np.full_like(ya, -2.0 / 3.0)
    if ik.a > 0:
        dtheta = 2.0 * ya / SQRT3 - 2.0 * SQRT3 * ik.a**2 / ya
        val = val - 2.0 * math.sqrt(2.0) * ik.a * np.sin(its_kapaev_theta(ya, ik)) * dtheta
    return float(val) if np.ndim(y) == 0 else val


@dataclass(frozen=True)
class SeededSolution:
    solution: PainleveSolution
    decay_max: float      # max |P| over the rightmost 20% of the interval
    decays: bool


def clarkson_mcleod_from_seed(ik: IKParams, y_seed: float, y_end: float, tol: float = 1e-10,
                              y_eval=None, decay_tol: float = 1e-2) -> SeededSolution:
    """Seed (P, P') from the asymptotics at y_seed and integrate to y_end."""
    if y_seed > -20:
        raise ValueError("y_seed must be <= -20")
    if not y_end > y_seed:
        raise ValueError("y_end must exceed y_seed")
    P0 = its_kapaev_eval(y_seed, ik)
    dP0 = its_kapaev_deriv(y_seed, ik)
    sol = integrate_ivp(y_seed, P0, dP0, y_end, tol, ik.params, y_eval=y_eval)
    cut = y_end - 0.2 * (y_end - y_seed)
    tail = sol.P[sol.y >= cut]
    decay_max = float(np.max(np.abs(tail))) if tail.size else float(abs(sol.P[-1]))
    return SeededSolution(sol, decay_max, decay_max < decay_tol)


# --- extraction from simulation -------------------------------------------

def similarity_variable(x, t: float):
    return -SQRT3 * np.asarray(x, dtype=float) / (2.0 * math.sqrt(t))


def extract_from_simulation(mb_state: FieldState, y_max: float) -> PainleveSolution:
    """Invert q = (sqrt3/(4 sqrt t)) (P + 2y/3) on the nodes with |y| <= y_max.

    P' comes from the spectral derivative of q through dy/dx = -sqrt3/(2 sqrt t).
    """
    if mb_state.system != "MB":
        raise ValueError("extraction needs an MB state")
    t = mb_state.t
    if t < 25:
        raise ValueError("extraction needs t >= 25")
    if not y_max > 0:
        raise ValueError("y_max must be positive")
    q = mb_state.field_b
    y = similarity_variable(mb_state.x, t)
    m = np.abs(y) <= y_max
    if not m.any():
        raise WindowEmptyError()
    qx = spectral_derivative(q, mb_state.grid, 1)
    P = (4.0 * math.sqrt(t) / SQRT3) * q - 2.0 * y / 3.0
    dP = -(8.0 * t / 3.0) * qx - 2.0 / 3.0
    order = np.argsort(y[m])
    return PainleveSolution(y[m][order], P[m][order], dP[m][order], DEFAULT_PARAMS)


@dataclass(frozen=True)
class FitResult:
    solution: PainleveSolution
    anchor: float
    max_misfit: float     # max |P_fit - P_extracted| over the window


def fit_transcendent(extracted: PainleveSolution, tol: float = 1e-10) -> FitResult:
    """Least-squares fit of a genuine Painleve IV solution to extracted samples.

    The two free initial values (P, P') are set at the sample of largest |P|
    in the middle half of the window; the fitted solution is then sampled on
    the extracted y grid.
    """
    y, Pd = extracted.y, extracted.P
    lo, hi = extracted.span
    mid = (y >= lo + 0.25 * (hi - lo)) & (y <= hi - 0.25 * (hi - lo))
    idx = np.flatnonzero(mid) if mid.any() else np.arange(y.size)
    ia = int(idx[np.argmax(np.abs(Pd[idx]))])
    ya = float(y[ia])
    params = extracted.params

    def solve(z):
        left = right = None
        if ya > lo:
            left = integrate_ivp(ya, z[0], z[1], lo, tol, params, y_eval=y[:ia + 1])
        if ya < hi:
            right = integrate_ivp(ya, z[0], z[1], hi, tol, params, y_eval=y[ia:])
        parts = [s for s in (left, right) if s is not None]
        if len(parts) == 1:
            return parts[0]
        a, b_ = parts
        ratio = None
        if a.ratio is not None and b_.ratio is not None:
            ratio = np.concatenate([a.ratio, b_.ratio[1:]])
        return PainleveSolution(np.concatenate([a.y, b_.y[1:]]), np.concatenate([a.P, b_.P[1:]]),
                                np.concatenate([a.dP, b_.dP[1:]]), params, ratio)

    def resid(z):
        try:
            return solve(z).P - Pd
        except (PoleError, ToleranceFailure):
            return np.full(y.size, 1e3)

    z0 = np.array([Pd[ia], extracted.dP[ia]])
    fit = least_squares(resid, z0, x_scale=np.maximum(np.abs(z0), 1.0), xtol=1e-12, ftol=1e-12)
    sol = solve(fit.x)
    return FitResult(sol, ya, float(np.max(np.abs(sol.P - Pd))))
