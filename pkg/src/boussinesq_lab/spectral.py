"""Pseudo-spectral simulation of the modified and good Boussinesq systems.

Both systems are evolved on a periodic box [-L, L) with an integrating-factor
RK4 scheme: the linear dispersive part is propagated exactly in Fourier space
and the quadratic nonlinearities go through the RK4 stages.

Modified Boussinesq (tag ``"MB"``, fields p, q)::

    p_t = 2 (p q)_x + q_xx
    q_t = -(1/3) p_xx + (2/3) p p_x - 2 q q_x

Good Boussinesq (tag ``"GB"``, fields u, w)::

    u_t = w_x
    w_t = -(4/3) (u^2)_x - (1/3) u_xxx
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Literal

import numpy as np

from .errors import BlowUpError, NonFiniteFieldError

SystemTag = Literal["MB", "GB"]
BLOWUP_THRESHOLD = 1e8


@dataclass(frozen=True)
class PeriodicGrid:
    half_length: float
    n_points: int

    def __post_init__(self):
        n = self.n_points
        if n < 16 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 16, got {n}")
        if not (self.half_length > 0 and math.isfinite(self.half_length)):
            raise ValueError("half_length must be positive and finite")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.n_points

    @property
    def x(self) -> np.ndarray:
        return -self.half_length + self.dx * np.arange(self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Non-negative wavenumbers pi*m/L of the real FFT layout."""
        m = np.arange(self.n_points // 2 + 1)
        return np.pi * m / self.half_length

    @property
    def dealias_mask(self) -> np.ndarray:
        m = np.arange(self.n_points // 2 + 1)
        return m < (self.n_points // 3)


@dataclass(frozen=True)
class FieldState:
    grid: PeriodicGrid
    t: float
    field_a: np.ndarray
    field_b: np.ndarray
    system: SystemTag

    def __post_init__(self):
        if self.system not in ("MB", "GB"):
            raise ValueError(f"unknown system tag {self.system!r}")
        for name in ("field_a", "field_b"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.grid.n_points,):
                raise ValueError(f"{name} must have length {self.grid.n_points}")
            object.__setattr__(self, name, arr)
        check_finite(self.field_a, self.field_b)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @classmethod
    def from_functions(cls, grid: PeriodicGrid, system: SystemTag,
                       fa: Callable[[np.ndarray], np.ndarray],
                       fb: Callable[[np.ndarray], np.ndarray], t: float = 0.0) -> "FieldState":
        x = grid.x
        return cls(grid, t, np.broadcast_to(fa(x), x.shape).copy(),
                   np.broadcast_to(fb(x), x.shape).copy(), system)


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    t_end: float
    dealias: bool = True
    scheme: str = "IFRK4"
    # optional hook called as callback(state) after every step
    callback: Callable[[FieldState], None] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be non-negative")
        if self.scheme != "IFRK4":
            raise ValueError(f"unsupported scheme {self.scheme!r}")


def check_finite(*arrays: np.ndarray) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NonFiniteFieldError()


def spectral_derivative(f: np.ndarray, grid: PeriodicGrid, order: int = 1) -> np.ndarray:
    """order-th x-derivative of a periodic sample vector via the real FFT."""
    if order not in (1, 2, 3, 4):
        raise ValueError("order must be in {1, 2, 3, 4}")
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.n_points,):
        raise ValueError(f"expected length {grid.n_points}")
    check_finite(f)
    fh = np.fft.rfft(f)
    ik = 1j * grid.wavenumbers
    if order % 2:
        # the Nyquist mode has no odd derivative on a real grid
        ik = ik.copy()
        ik[-1] = 0.0
    return np.fft.irfft(fh * ik**order, n=grid.n_points)


def _product_hat(a: np.ndarray, b: np.ndarray, mask: np.ndarray | None) -> np.ndarray:
    h = np.fft.rfft(a * b)
    if mask is not None:
        h *= mask
    return h


def rhs_mb(state: FieldState, dealias: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise (p_t, q_t) of the modified Boussinesq system."""
    if state.system != "MB":
        raise ValueError("rhs_mb needs an MB state")
    grid = state.grid
    p, q = state.field_a, state.field_b
    check_finite(p, q)
    mask = grid.dealias_mask if dealias else None
    ik = 1j * grid.wavenumbers
    ph, qh = np.fft.rfft(p), np.fft.rfft(q)
    pq = _product_hat(p, q, mask)
    quad = _product_hat(p, p, mask) / 3.0 - _product_hat(q, q, mask)
    n = grid.n_points
    dp = np.fft.irfft(2 * ik * pq + ik**2 * qh, n=n)
    dq = np.fft.irfft(-(ik**2) * ph / 3.0 + ik * quad, n=n)
    return dp, dq


def rhs_gb(state: FieldState, dealias: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise (u_t, w_t) of the good Boussinesq system."""
    if state.system != "GB":
        raise ValueError("rhs_gb needs a GB state")
    grid = state.grid
    u, w = state.field_a, state.field_b
    check_finite(u, w)
    mask = grid.dealias_mask if dealias else None
    ik = 1j * grid.wavenumbers
    uh, wh = np.fft.rfft(u), np.fft.rfft(w)
    u2 = _product_hat(u, u, mask)
    n = grid.n_points
    du = np.fft.irfft(ik * wh, n=n)
    dw = np.fft.irfft(-(4.0 / 3.0) * ik * u2 - (ik**3) * uh / 3.0, n=n)
    return du, dw


def _linear_coupling(grid: PeriodicGrid, system: SystemTag) -> tuple[np.ndarray, np.ndarray]:
    """Off-diagonal entries (m01, m10) of the linear Fourier operator.

    Both systems have the form a_t = m01 b, b_t = m10 a with m01*m10 = -k^4/3.
    """
    k = grid.wavenumbers
    if system == "MB":
        return -(k**2) + 0j, (k**2) / 3.0 + 0j
    return 1j * k, 1j * k**3 / 3.0


def _propagator(grid: PeriodicGrid, system: SystemTag, h: float):
    """exp(h M) for the 2x2 linear operator, per wavenumber."""
    m01, m10 = _linear_coupling(grid, system)
    omega = grid.wavenumbers**2 / math.sqrt(3.0)
    c = np.cos(omega * h)
    # sin(omega h)/omega, regular at k = 0
    s_over_w = h * np.sinc(omega * h / np.pi)
    return c, m01 * s_over_w, m10 * s_over_w


def _apply(E, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c, e01, e10 = E
    return c * a + e01 * b, e10 * a + c * b


def _nonlinear_hat(ah: np.ndarray, bh: np.ndarray, grid: PeriodicGrid,
                   system: SystemTag, mask: np.ndarray | None):
    n = grid.n_points
    ik = 1j * grid.wavenumbers
    a = np.fft.irfft(ah, n=n)
    if system == "MB":
        b = np.fft.irfft(bh, n=n)
        na = 2.0 * ik * _product_hat(a, b, mask)
        nb = ik * (_product_hat(a, a, mask) / 3.0 - _product_hat(b, b, mask))
        return na, nb
    nb = -(4.0 / 3.0) * ik * _product_hat(a, a, mask)
    return np.zeros_like(ah), nb


def suggest_dt(grid: PeriodicGrid, system: SystemTag, cfl: float = 0.5) -> float:
    """Conservative step for the integrating-factor scheme, proportional to dx.

    The dispersive linear part is propagated exactly, so only the advective
    nonlinear terms constrain the step.
    """
    if system not in ("MB", "GB"):
        raise ValueError(f"unknown system tag {system!r}")
    return cfl * grid.dx


def integrate(state: FieldState, cfg: StepperConfig) -> FieldState:
    """Advance ``state`` to ``cfg.t_end`` with integrating-factor RK4.

    The final step is shortened so the returned time equals ``t_end`` exactly.
    Raises BlowUpError when a field exceeds 1e8 in magnitude and
    NonFiniteFieldError on NaN/Inf.
    """
    if cfg.t_end < state.t:
        raise ValueError("t_end precedes the state's time")
    grid, system = state.grid, state.system
    mask = grid.dealias_mask if cfg.dealias else None
    n = grid.n_points

    ah = np.fft.rfft(state.field_a)
    bh = np.fft.rfft(state.field_b)
    if mask is not None:
        ah *= mask
        bh *= mask

    span = cfg.t_end - state.t
    n_steps = int(math.ceil(span / cfg.dt - 1e-9)) if span > 0 else 0
    cache: dict[float, tuple] = {}

    def props(h: float):
        if h not in cache:
            cache[h] = (_propagator(grid, system, h), _propagator(grid, system, h / 2))
        return cache[h]

    t = state.t
    for i in range(n_steps):
        h = cfg.dt if i < n_steps - 1 else cfg.t_end - t
        if h <= 0:
            break
        E, E2 = props(h)
        k1a, k1b = _nonlinear_hat(ah, bh, grid, system, mask)
        ua, ub = _apply(E2, ah + 0.5 * h * k1a, bh + 0.5 * h * k1b)
        k2a, k2b = _nonlinear_hat(ua, ub, grid, system, mask)
        ea, eb = _apply(E2, ah, bh)
        k3a, k3b = _nonlinear_hat(ea + 0.5 * h * k2a, eb + 0.5 * h * k2b, grid, system, mask)
        fa, fb = _apply(E, ah, bh)
        e3a, e3b = _apply(E2, k3a, k3b)
        k4a, k4b = _nonlinear_hat(fa + h * e3a, fb + h * e3b, grid, system, mask)
        e1a, e1b = _apply(E, k1a, k1b)
        e23a, e23b = _apply(E2, k2a + k3a, k2b + k3b)
        ah = fa + (h / 6.0) * (e1a + 2.0 * e23a + k4a)
        bh = fb + (h / 6.0) * (e1b + 2.0 * e23b + k4b)
        t = state.t + cfg.dt * (i + 1) if i < n_steps - 1 else cfg.t_end

        if cfg.callback is not None or (i % 16 == 0) or i == n_steps - 1:
            a = np.fft.irfft(ah, n=n)
            b = np.fft.irfft(bh, n=n)
            _guard(t, a, b)
            if cfg.callback is not None:
                cfg.callback(FieldState(grid, t, a, b, system))

    a = np.fft.irfft(ah, n=n)
    b = np.fft.irfft(bh, n=n)
    _guard(t, a, b)
    return FieldState(grid, cfg.t_end if n_steps else state.t, a, b, system)


def _guard(t: float, a: np.ndarray, b: np.ndarray) -> None:
    check_finite(a, b)
    peak = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    if peak > BLOWUP_THRESHOLD:
        raise BlowUpError(t, peak)


def grid_mean(f: np.ndarray) -> float:
    return float(np.mean(f))


def with_time(state: FieldState, t: float) -> FieldState:
    return replace(state, t=t)


# --- initial data from the reference experiments ---------------------------

def paper_mb(grid: PeriodicGrid) -> FieldState:
    """Gaussian data p0 = -exp(-x^2/20)/10, q0 = exp(-x^2/20)/10."""
    return FieldState.from_functions(
        grid, "MB",
        lambda x: -0.1 * np.exp(-x**2 / 20.0),
        lambda x: 0.1 * np.exp(-x**2 / 20.0))


def paper_gb(grid: PeriodicGrid) -> FieldState:
    """Miura image of :func:`paper_mb` in closed form."""
    def u0(x):
        return -np.exp(-x**2 / 10.0) / 50.0 - x * np.exp(-x**2 / 20.0) / 100.0

    def w0(x):
        return (-x * np.exp(-x**2 / 10.0) / 250.0
                + (0.01 - x**2 / 1000.0) * np.exp(-x**2 / 20.0))

    return FieldState.from_functions(grid, "GB", u0, w0)


# --- CSV snapshots ----------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_state_csv(state: FieldState, path: str | Path) -> None:
    g = state.grid
    lines = [f"# system={state.system} t={_fmt(state.t)} L={_fmt(g.half_length)} N={g.n_points}",
             "x,field_a,field_b"]
    for xi, a, b in zip(g.x, state.field_a, state.field_b):
        lines.append(f"{_fmt(xi)},{_fmt(a)},{_fmt(b)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_state_csv(path: str | Path) -> FieldState:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing preamble line")
    meta = dict(tok.split("=", 1) for tok in text[0][1:].split())
    if text[1].strip() != "x,field_a,field_b":
        raise ValueError(f"{path}: unexpected header {text[1]!r}")
    data = np.loadtxt(text[2:], delimiter=",", ndmin=2)
    grid = PeriodicGrid(float(meta["L"]), int(meta["N"]))
    if data.shape[0] != grid.n_points:
        raise ValueError(f"{path}: expected {grid.n_points} rows, got {data.shape[0]}")
    return FieldState(grid, float(meta["t"]), data[:, 1], data[:, 2], meta["system"])
