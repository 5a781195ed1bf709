"""Comparison pipeline shared by the command line and the acceptance runs:
simulate to a list of times, obtain a Painleve IV transcendent, and tabulate
simulated against asymptotic fields."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .asymptotics import (RegionConstants, RegionLabel, classify_region, error_band,
                          eval_gb_painleve, eval_mb_painleve)
from .painleve import (DEFAULT_PARAMS, IKParams, PainleveSolution, clarkson_mcleod_from_seed,
                       extract_from_simulation, fit_transcendent, similarity_variable)
from .spectral import FieldState, StepperConfig, integrate, suggest_dt


class StabilityError(RuntimeError):
    pass


def simulate_times(state: FieldState, times, dt: float | None = None,
                   dealias: bool = True) -> list[FieldState]:
    """Snapshots at each requested time, advancing one trajectory."""
    bound = suggest_dt(state.grid, state.system)
    if dt is None:
        dt = bound
    elif dt > bound * (1 + 1e-12):
        raise StabilityError(f"rejected step: dt={dt:.6g} exceeds the stability bound {bound:.6g}")
    out, cur = [], state
    for t in times:
        if t > cur.t:
            cur = integrate(cur, StepperConfig(dt=dt, t_end=float(t), dealias=dealias))
        out.append(cur)
    return out


def exact_member(y: np.ndarray) -> PainleveSolution:
    y = np.asarray(y, dtype=float)
    return PainleveSolution(y, -2.0 * y / 3.0, np.full_like(y, -2.0 / 3.0), DEFAULT_PARAMS,
                            ratio=np.zeros_like(y))


def transcendent_from_snapshot(mb_state: FieldState, fit_y_max: float,
                               tol: float = 1e-10) -> tuple[PainleveSolution, float]:
    """Fitted transcendent and its max misfit against the extracted samples.

    Identically zero q extracts to the exact member -2y/3, which is returned
    as is.
    """
    ex = extract_from_simulation(mb_state, fit_y_max)
    if not np.any(ex.P + 2.0 * ex.y / 3.0):
        return exact_member(ex.y), 0.0
    fit = fit_transcendent(ex, tol)
    return fit.solution, fit.max_misfit


def seeded_transcendent(a: float, arg_s: float, y_seed: float, y_max: float,
                        tol: float = 1e-10) -> PainleveSolution:
    y = np.linspace(y_seed, y_max, int(math.ceil((y_max - y_seed) * 1000)) + 1)
    if a == 0:
        return exact_member(y)
    return clarkson_mcleod_from_seed(IKParams(a, arg_s), y_seed, y_max, tol, y_eval=y).solution


@dataclass(frozen=True)
class ComparisonRow:
    x: float
    t: float
    field: str
    simulated: float
    asymptotic: float
    abs_error: float
    region: RegionLabel
    error_order: float

    HEADER = "x,t,field,simulated,asymptotic,abs_error,region,error_order"

    def csv(self) -> str:
        f = "{:.17g}".format
        return ",".join([f(self.x), f(self.t), self.field, f(self.simulated), f(self.asymptotic),
                         f(self.abs_error), self.region.value, f(self.error_order)])


def comparison_rows(state: FieldState, sol: PainleveSolution, y_max: float,
                    rc: RegionConstants = RegionConstants()) -> list[ComparisonRow]:
    """Rows for every node with |y| <= y_max; (p, q) for MB and u for GB."""
    t = state.t
    x = state.x
    y = similarity_variable(x, t)
    m = np.abs(y) <= y_max
    xs = x[m]
    if state.system == "MB":
        p, q = eval_mb_painleve(xs, t, sol)
        fields = (("p", state.field_a[m], p), ("q", state.field_b[m], q))
    else:
        u = eval_gb_painleve(xs, t, sol)
        fields = (("u", state.field_a[m], u),)
    rows = []
    for name, sim, asym in fields:
        for xi, s, a in zip(xs, sim, asym):
            reg = classify_region(float(xi), t, rc)
            rows.append(ComparisonRow(float(xi), t, name, float(s), float(a), abs(float(s - a)),
                                      reg, error_band(reg, float(xi), t, state.system)))
    return rows


def max_errors(rows: list[ComparisonRow]) -> dict[tuple[float, str], float]:
    out: dict[tuple[float, str], float] = {}
    for r in rows:
        key = (r.t, r.field)
        out[key] = max(out.get(key, 0.0), r.abs_error)
    return out


def error_summary(rows: list[ComparisonRow], system: str) -> str:
    errs = max_errors(rows)
    lines = ["t,field,max_abs_error,painleve_error_order"]
    for (t, name), e in sorted(errs.items()):
        lines.append(f"{t:.17g},{name},{e:.17g},{error_band(RegionLabel.PAINLEVE, 0.0, t, system):.17g}")
    fields = sorted({k[1] for k in errs})
    times = sorted({k[0] for k in errs})
    for name in fields:
        for t0, t1 in zip(times, times[1:]):
            e0, e1 = errs[(t0, name)], errs[(t1, name)]
            ratio = e0 / e1 if e1 > 0 else (math.inf if e0 > 0 else 1.0)
            lines.append(f"# decay {name} t={t0:g}->{t1:g}: ratio {ratio:.6g}")
    return "\n".join(lines) + "\n"


def write_rows(rows: list[ComparisonRow], path: str | Path) -> None:
    Path(path).write_text("\n".join([ComparisonRow.HEADER] + [r.csv() for r in rows]) + "\n")


def gnuplot_compare(csv_name: str, times, fields, out_png: str = "compare.png") -> str:
    """Overlay script: simulated (solid) against asymptotic (dashed)."""
    lines = ["set datafile separator ','", f"set terminal pngcairo size 1000,{400 * len(fields)}",
             f"set output '{out_png}'", "set key top right", "set xlabel 'x'",
             f"set multiplot layout {len(fields)},1"]
    for name in fields:
        lines.append(f"set ylabel '{name}'")
        plots = []
        for i, t in enumerate(times):
            sel = f"(strcol(3) eq '{name}' && abs($2-{t:.17g})<1e-9 ? "
            plots.append(f"'{csv_name}' every ::1 using 1:{sel}$4 : 1/0) with lines lt {i + 1} dt 1 "
                         f"title '{name} simulated t={t:g}'")
            plots.append(f"'{csv_name}' every ::1 using 1:{sel}$5 : 1/0) with lines lt {i + 1} dt 2 "
                         f"title '{name} asymptotic t={t:g}'")
        lines.append("plot " + ", \\\n     ".join(plots))
    lines.append("unset multiplot")
    return "\n".join(lines) + "\n"
