"""Command-line front end: ``boussinesq-lab <subcommand>``.

Exit codes: 0 ok, 2 configuration, 3 solver, 4 empty extraction window,
5 Painleve pole, 6 identity-suite failure.
"""

from __future__ import annotations

import argparse
import cmath
import math
import sys
from pathlib import Path

import numpy as np

from . import rh
from .asymptotics import RegionConstants, classify_region, RegionLabel
from .config import ConfigError, RunConfig, load_config
from .errors import BlowUpError, NonFiniteFieldError, PoleError, ToleranceFailure, WindowEmptyError
from .harness import (StabilityError, comparison_rows, error_summary, gnuplot_compare,
                      seeded_transcendent, simulate_times, transcendent_from_snapshot, write_rows)
from .painleve import (IKParams, PainleveSolution, appendix_reduction_check,
                       clarkson_mcleod_from_seed, model_residual)
from .spectral import write_state_csv

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_WINDOW, EXIT_POLE, EXIT_SUITE = 0, 2, 3, 4, 5, 6


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg)


def _out_dir(args, cfg: RunConfig | None = None) -> Path:
    d = Path(args.out or (cfg.out_dir if cfg else "out"))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _load(args) -> RunConfig:
    if not args.config:
        raise ConfigError("--config is required for this subcommand")
    return load_config(args.config)


# --- subcommands --------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    snaps = simulate_times(cfg.initial_state(), cfg.times, cfg.dt, cfg.dealias)
    for s in snaps:
        path = out / f"snapshot_{s.system}_t{s.t:g}.csv"
        write_state_csv(s, path)
        _say(args, f"wrote {path}")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    snaps = simulate_times(cfg.initial_state(), cfg.times, cfg.dt, cfg.dealias)
    if cfg.source == "extract":
        t_ex = cfg.extract_time if cfg.extract_time is not None else cfg.times[-1]
        if t_ex < 25:
            raise ConfigError("extraction needs a snapshot time >= 25")
        if cfg.system == "MB":
            have = [s for s in snaps if s.t == t_ex]
            mb = have[0] if have else simulate_times(cfg.initial_state(), [t_ex], cfg.dt, cfg.dealias)[0]
        else:
            comp = cfg.companion_state()
            if comp is None:
                raise ConfigError("GB extraction needs an mB companion (initial.companion)")
            mb = simulate_times(comp, [t_ex], cfg.dt, cfg.dealias)[0]
        sol, misfit = transcendent_from_snapshot(mb, cfg.fit_y_max)
        _say(args, f"transcendent fitted to t={t_ex:g} extraction, max misfit {misfit:.3e}")
    else:
        sol = seeded_transcendent(cfg.seed_a, cfg.seed_arg_s, cfg.seed_y, cfg.y_max + 0.5)
    rows = []
    for s in snaps:
        if s.t <= 0:
            continue
        rows += comparison_rows(s, sol, cfg.y_max, cfg.regions)
    if not rows:
        raise WindowEmptyError()
    write_rows(rows, out / "comparison.csv")
    summary = error_summary(rows, cfg.system)
    (out / "error_summary.csv").write_text(summary)
    fields = ("p", "q") if cfg.system == "MB" else ("u",)
    times = sorted({r.t for r in rows})
    (out / "compare.gp").write_text(gnuplot_compare("comparison.csv", times, fields))
    _say(args, summary.rstrip())
    return EXIT_OK


def cmd_painleve(args) -> int:
    out = _out_dir(args)
    if args.tol < 1e-12 or args.tol > 1e-4:
        raise ConfigError("tol must lie in [1e-12, 1e-4]")
    if not args.y_end > args.y_seed:
        raise ConfigError("y-end must exceed y-seed")
    if args.y_seed > -20:
        raise ConfigError("y-seed must be <= -20")
    sol = seeded_transcendent(args.a, args.arg_s, args.y_seed, args.y_end, args.tol)
    sol.to_csv(out / "painleve.csv")
    lines = [f"a = {_fmt(args.a)}", f"arg_s = {_fmt(args.arg_s)}",
             f"y_seed = {_fmt(args.y_seed)}", f"y_end = {_fmt(args.y_end)}", f"tol = {_fmt(args.tol)}"]
    # residuals on the part of the interval away from the seed's fast oscillation
    lo = max(args.y_seed, -args.residual_window)
    part = sol.restrict(lo, args.y_end)
    # drop samples where P vanishes (the exact member has P(0) = 0); the
    # residual stencils are built for non-uniform nodes
    mask = np.abs(part.P) > 1e-8
    if mask.sum() < 9:
        raise ConfigError("too few samples with P != 0 for residual diagnostics")
    part = PainleveSolution(part.y[mask], part.P[mask], part.dP[mask], part.params)
    res = model_residual(part)
    try:
        r_phi, r_fg = appendix_reduction_check(part)
    except ArithmeticError as exc:
        r_phi = r_fg = math.nan
        lines.append(f"# reduction check skipped: {exc}")
    lines += [f"model_residual[{_fmt(lo)},{_fmt(args.y_end)}] = {res:.6e}",
              f"phi2_residual = {r_phi:.6e}", f"fg_residual = {r_fg:.6e}"]
    tail = sol.P[sol.y >= args.y_end - 0.2 * (args.y_end - args.y_seed)]
    lines.append(f"decay_max = {float(np.max(np.abs(tail))):.6e}")
    if args.compare_seed is not None:
        if args.compare_seed > -20:
            raise ConfigError("compare-seed must be <= -20")
        lo2 = max(args.y_seed, args.compare_seed)
        y = sol.y[sol.y >= lo2]
        if args.a == 0:
            other = -2.0 * y / 3.0
        else:
            other = clarkson_mcleod_from_seed(IKParams(args.a, args.arg_s), args.compare_seed,
                                              args.y_end, args.tol, y_eval=y).solution.P
        disc = float(np.max(np.abs(sol.P[sol.y >= lo2] - other)))
        lines.append(f"seed_discrepancy[{_fmt(args.y_seed)} vs {_fmt(args.compare_seed)}] = {disc:.6e}")
    report = "\n".join(lines) + "\n"
    (out / "painleve_diagnostics.txt").write_text(report)
    _say(args, report.rstrip())
    return EXIT_OK


def rh_suites(refl: rh.ReflectionSamples, samples: int = 8) -> list[tuple[str, float, float]]:
    """(name, worst defect, tolerance) for each identity suite."""
    radii = np.linspace(0.25, 2.5, samples)
    xs, ts = (-3.0, 0.0, 2.5), (0.5, 2.0)
    det = 0.0
    for ray in range(1, 7):
        for rho in radii:
            k = rho * cmath.exp(1j * rh.RAY_ANGLES[ray - 1])
            for x in xs:
                for t in ts:
                    det = max(det, abs(rh.build_jump(ray, x, t, k, refl).det - 1))
    data = rh.ModelJumpData.from_r1(complex(refl.r1(0.0)))
    for lam in (0.0, 0.3 + 0.1j, -0.2 + 0.25j):
        for m in rh.model_jumps(data, 0.7, lam):
            det = max(det, abs(m.det - 1))
    fact = 0.0
    for rho in radii:
        for x in xs:
            for t in ts:
                U, R, L = rh.v4_factors(x, t, -rho, refl)
                v4 = rh.build_jump(4, x, t, -rho, refl).entries
                fact = max(fact, float(np.max(np.abs(U @ R @ L - v4))))
    plem = 0.0
    eps = 1e-8
    for s in np.linspace(0.2, 2.0, max(3, samples // 2)):
        ratio = rh.delta1(s + 1j * eps, refl) / rh.delta1(s - 1j * eps, refl)
        plem = max(plem, abs(ratio - (1 - abs(complex(refl.r1(s))) ** 2)))
    hexa = float(np.max(np.abs(rh.hexagon_product(data) - np.eye(3))))
    z3, z2 = 0.0, 0.0
    for lam in (0.3 + 0.1j, -0.4 + 0.2j, 0.1 - 0.5j):
        a, b = rh.symmetry_defects(data, 0.7, lam)
        z3, z2 = max(z3, a), max(z2, b)
    return [("unimodularity", det, 1e-12), ("v4 factorization", fact, 1e-14),
            ("Plemelj jump", plem, 1e-6), ("hexagon product", hexa, 1e-13),
            ("Z3 symmetry", z3, 1e-12), ("Z2 symmetry", z2, 1e-12),
            ("constraint closure", data.constraint_defect(), 1e-12)]


def cmd_rh_check(args) -> int:
    if args.preset not in rh.PRESETS:
        raise ConfigError(f"unknown preset {args.preset!r}")
    if args.samples < 1:
        raise ConfigError("samples must be positive")
    try:
        refl = rh.PRESETS[args.preset](args.amplitude) if args.preset != "zero" else rh.ReflectionSamples.zero()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = rh_suites(refl, args.samples)
    ok = True
    lines = [f"{'suite':<20} {'defect':>12} {'tol':>8}  status"]
    for name, val, tol in rows:
        passed = val <= tol
        ok &= passed
        lines.append(f"{name:<20} {val:12.3e} {tol:8.0e}  {'PASS' if passed else 'FAIL'}")
    _say(args, "\n".join(lines))
    if args.out:
        (_out_dir(args) / "rh_check.txt").write_text("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_SUITE


def _label_from_inequalities(ax: float, b1: float, b2: float, b3: float) -> RegionLabel:
    # the printed conditions, read left to right; a later region is empty
    # whenever its lower boundary exceeds its upper one
    if ax < b1:
        return RegionLabel.PAINLEVE
    if ax <= b2:
        return RegionLabel.TRANSITION_I
    if ax <= b3:
        return RegionLabel.TRANSITION_II
    return RegionLabel.DISPERSIVE


def cmd_regions(args) -> int:
    try:
        rc = RegionConstants(args.c1, args.c2, args.c3)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.t_list:
        ts = [float(v) for v in args.t_list.split(",")]
    else:
        if not 0 < args.t_min < args.t_max or args.n < 2:
            raise ConfigError("need 0 < t-min < t-max and n >= 2")
        ts = list(np.geomspace(args.t_min, args.t_max, args.n))
    if any(t <= 0 for t in ts):
        raise ConfigError("times must be positive")
    out = _out_dir(args)
    lines = ["t,x_painleve,x_transition_I,x_transition_II"]
    bad = 0
    unnested = []
    for t in ts:
        b1, b2, b3 = rc.boundaries(t)
        lines.append(",".join(_fmt(v) for v in (t, b1, b2, b3)))
        if not b1 <= b2 <= b3:
            unnested.append(t)
        for b in (b1, b2, b3):
            for x in (b * (1 - 1e-9), b, b * (1 + 1e-9)):
                for sgn in (1, -1):
                    if classify_region(sgn * x, t, rc) is not _label_from_inequalities(x, b1, b2, b3):
                        bad += 1
    (out / "regions.csv").write_text("\n".join(lines) + "\n")
    gp = ["set datafile separator ','", "set terminal pngcairo size 800,600",
          "set output 'regions.png'", "set xlabel 'x'", "set ylabel 't'", "set key outside",
          "plot 'regions.csv' every ::1 using 2:1 with lines lt 1 title 'x = c1 t^{1/2}', \\",
          "     '' every ::1 using (-$2):1 with lines lt 1 notitle, \\",
          "     '' every ::1 using 3:1 with lines lt 2 title 'x = c2 t^{3/4}', \\",
          "     '' every ::1 using (-$3):1 with lines lt 2 notitle, \\",
          "     '' every ::1 using 4:1 with lines lt 3 title 'x = c3 t', \\",
          "     '' every ::1 using (-$4):1 with lines lt 3 notitle"]
    (out / "regions.gp").write_text("\n".join(gp) + "\n")
    _say(args, f"wrote {out / 'regions.csv'} ({len(ts)} times); classification mismatches: {bad}")
    if unnested:
        _say(args, f"note: boundaries not nested (a region is empty) at {len(unnested)} times, "
                   f"t <= {max(unnested):g}")
    return EXIT_OK if bad == 0 else EXIT_SUITE


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")
    p = _Parser(prog="boussinesq-lab", parents=[common],
                description="Boussinesq / Painleve IV numerical laboratory")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("simulate", parents=[common], help="write field snapshots")
    sub.add_parser("compare", parents=[common], help="compare simulation with Painleve asymptotics")
    pp = sub.add_parser("painleve", parents=[common], help="seeded Painleve IV solution")
    pp.add_argument("--a", type=float, default=0.05)
    pp.add_argument("--arg-s", type=float, default=0.0)
    pp.add_argument("--y-seed", type=float, default=-40.0)
    pp.add_argument("--y-end", type=float, default=0.0)
    pp.add_argument("--tol", type=float, default=1e-10)
    pp.add_argument("--compare-seed", type=float, default=None)
    pp.add_argument("--residual-window", type=float, default=20.0,
                    help="residuals are reported on y >= -window")
    pr = sub.add_parser("rh-check", parents=[common], help="Riemann-Hilbert identity suites")
    pr.add_argument("--preset", default="gaussian", choices=sorted(rh.PRESETS))
    pr.add_argument("--amplitude", type=float, default=0.5)
    pr.add_argument("--samples", type=int, default=8)
    pg = sub.add_parser("regions", parents=[common], help="region boundary curves")
    pg.add_argument("--c1", type=float, default=2.0)
    pg.add_argument("--c2", type=float, default=1.0)
    pg.add_argument("--c3", type=float, default=0.25)
    pg.add_argument("--t-min", type=float, default=1.0)
    pg.add_argument("--t-max", type=float, default=1000.0)
    pg.add_argument("--n", type=int, default=200)
    pg.add_argument("--t-list", default=None, help="comma-separated times instead of a range")
    return p


COMMANDS = {"simulate": cmd_simulate, "compare": cmd_compare, "painleve": cmd_painleve,
            "rh-check": cmd_rh_check, "regions": cmd_regions}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WindowEmptyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WINDOW
    except PoleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POLE
    except (BlowUpError, NonFiniteFieldError, StabilityError, ToleranceFailure) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
