"""Command-line interface: ``kickedrotor {evolve,profile,fit,sweep,compare,validate}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (or a
failed sweep run), 4 back-end divergence in ``compare``, 5 failed self-check.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Any


from .config import (PRESETS, config_from_dict, config_to_dict, dump_json, load_config_file,
                     load_preset)
from .core import (Backend, KickedRotorError, NumericalError, TruncationError, ValidationError,
                   cumulative_kicks, kick_strengths)
from .observables import FitError, TimeSeries, classify, fit_gamma
from .propagator import (PhaseTable, analytic_states, evolve, max_amplitude_difference,
                         start_state, step_banded, step_spectral)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_DIVERGE, EXIT_VALIDATE = 0, 2, 3, 4, 5
COMPARE_TOL = 1e-9


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run configuration (flags override --config)")
    g.add_argument("--config", help="INI config file, or a meta.json written by a previous run")
    g.add_argument("--preset", choices=PRESETS, help="shipped figure-reproduction config")
    g.add_argument("--p", type=int)
    g.add_argument("--q", type=int)
    g.add_argument("--alpha", type=float)
    g.add_argument("--kappa0", type=float)
    g.add_argument("--schedule", choices=("power_law", "constant", "explicit"))
    g.add_argument("--schedule-file", help="explicit kick sequence, one value per line")
    g.add_argument("--initial-m", type=int, help="delta initial condition at momentum m")
    g.add_argument("--steps", type=int)
    g.add_argument("--backend", choices=[b.value for b in Backend])
    g.add_argument("--tail-tol", type=float)
    g.add_argument("--edge-threshold", type=float)
    g.add_argument("--growth-chunk", type=int)
    g.add_argument("--max-halfwidth", type=int)
    g.add_argument("--window", type=int, default=None, help="gamma fit window (default 100)")
    g.add_argument("--smooth", type=int, default=None, help="moving-average width before fitting")
    g.add_argument("--tol", type=float, default=None, help="regime classification tolerance")


def _raw_config(args) -> tuple[dict[str, dict[str, Any]], Path | None]:
    raw: dict[str, dict[str, Any]] = {}
    base_dir = None
    if getattr(args, "preset", None):
        raw = load_preset(args.preset)
    if getattr(args, "config", None):
        loaded = load_config_file(args.config)
        base_dir = Path(args.config).parent
        for section, values in loaded.items():
            raw.setdefault(section, {}).update(values)
    return raw, base_dir


def _effective(args) -> tuple[dict[str, dict[str, Any]], Path | None]:
    raw, base_dir = _raw_config(args)

    def put(section, key, value):
        if value is not None:
            raw.setdefault(section, {})[key] = value

    put("resonance", "p", args.p)
    put("resonance", "q", args.q)
    sched = raw.setdefault("schedule", {})
    if args.schedule is not None:
        if args.schedule != sched.get("kind"):
            sched.pop("values", None)
        sched["kind"] = args.schedule
    if args.schedule_file is not None:
        sched.pop("values", None)
        sched["kind"] = "explicit"
        sched["file"] = str(Path(args.schedule_file).resolve())
    put("schedule", "alpha", args.alpha)
    put("schedule", "kappa0", args.kappa0)
    if args.initial_m is not None:
        raw["initial"] = {"kind": "delta", "m": args.initial_m}
    put("run", "steps", args.steps)
    put("run", "backend", args.backend)
    put("run", "tail_tol", args.tail_tol)
    put("truncation", "edge_threshold", args.edge_threshold)
    put("truncation", "growth_chunk", args.growth_chunk)
    put("truncation", "max_halfwidth", args.max_halfwidth)
    put("fit", "window", args.window)
    put("fit", "smooth", args.smooth)
    put("fit", "tol", args.tol)
    return raw, base_dir


def _fit_options(raw) -> tuple[int, int | None, float]:
    fit = raw.get("fit", {})
    smooth = fit.get("smooth")
    smooth = int(smooth) if smooth not in (None, "", "0", 0) else None
    return int(fit.get("window", 100)), smooth, float(fit.get("tol", 0.05))


def _report_fit(series: TimeSeries, window: int, smooth, tol) -> None:
    if len(series) - 1 < window:
        print(f"gamma        : n/a (fewer than {window} steps)")
        return
    try:
        fit = fit_gamma(series, window, smooth)
    except FitError as exc:
        print(f"gamma        : n/a ({exc})")
        return
    print(f"gamma        : {fit.gamma:.6f}  (window {fit.window[0]}..{fit.window[1]}, "
          f"model {fit.model.value})")
    print(f"regime       : {classify(fit, tol).value}")


def _write_meta(out: Path, cfg, extra: dict[str, Any] | None = None) -> None:
    meta = {"config": config_to_dict(cfg)}
    if extra:
        meta.update(extra)
    (out / "meta.json").write_text(dump_json(meta), encoding="utf-8")


# --------------------------------------------------------------------------
# commands


def cmd_evolve(args) -> int:
    raw, base_dir = _effective(args)
    cfg = config_from_dict(raw, base_dir)
    window, smooth, tol = _fit_options(raw)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    series, final, snapshots = evolve(cfg)
    series.to_csv(out / "series.csv")
    final.to_csv(out / "final.csv")
    for n, snap in sorted(snapshots.items()):
        snap.to_csv(out / f"snapshot_{n}.csv")
    _write_meta(out, cfg)
    print(f"resonance    : {cfg.resonance}  backend {cfg.backend.value}  steps {cfg.steps}")
    print(f"final n*     : {series.n_star[-1]:.10g}")
    print(f"final sigma  : {series.sigma[-1]:.10g}")
    print(f"leaked norm  : {final.leaked_norm:.3e}")
    _report_fit(series, window, smooth, tol)
    return EXIT_OK


def _write_profile(path: Path, state) -> None:
    rows = zip(state.momenta, state.probabilities)
    lines = ["l,prob"] + [f"{l},{float(p)!r}" for l, p in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_profile(args) -> int:
    from .svg import line_plot

    raw, base_dir = _effective(args)
    at = args.at_step
    raw.setdefault("run", {})["steps"] = at
    raw["run"]["snapshot_steps"] = [at]
    cfg = config_from_dict(raw, base_dir)
    series, final, _ = evolve(cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_profile(out, final)
    log_scale = args.log if args.log is not None else (
        str(raw.get("plot", {}).get("log_scale", "no")).lower() in ("yes", "true", "1"))
    if args.svg:
        line_plot([(final.momenta, final.probabilities)], [f"n = {at}"], args.svg,
                  logy=log_scale, xlabel="l", ylabel="P_l")
    print(f"profile at n = {at}: sigma = {series.sigma[-1]:.10g}, written to {out}")
    return EXIT_OK


def cmd_fit(args) -> int:
    series = TimeSeries.from_csv(args.series)
    tol = args.tol if args.tol is not None else 0.05
    fit = fit_gamma(series, args.window or 100, args.smooth or None)
    print(f"gamma          : {fit.gamma:.10g}")
    print(f"log amplitude  : {fit.log_amplitude:.10g}")
    print(f"window         : {fit.window[0]}..{fit.window[1]}")
    print(f"power-law rms  : {fit.rms_residual:.3e}")
    print(f"logarithm rms  : {fit.log_rms_residual:.3e}")
    print(f"model          : {fit.model.value}")
    print(f"regime         : {classify(fit, tol).value}")
    return EXIT_OK


def _parse_resonances(text: str):
    from .core import make_resonance

    out = []
    for item in str(text).replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        p, _, q = item.partition("/")
        out.append(make_resonance(int(p), int(q or 1)))
    return out


def _parse_floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(",", " ").split()]


def cmd_sweep(args) -> int:
    from .sweep import SweepSpec, run_sweep, summarize

    raw, base_dir = _effective(args)
    sweep = raw.get("sweep", {})
    alphas = _parse_floats(args.alphas if args.alphas is not None else sweep.get("alphas", ""))
    res_text = args.resonances or sweep.get("resonances")
    if res_text:
        resonances = _parse_resonances(res_text)
    else:
        resonances = [config_from_dict(raw, base_dir).resonance]
    window, smooth, tol = _fit_options(raw)
    if "window" in sweep and args.window is None:
        window = int(sweep["window"])
    # the base config must be valid for any resonance in the sweep
    base_raw = dict(raw)
    if str(base_raw.get("run", {}).get("backend", "")).lower() == "analytic":
        base_raw["resonance"] = {"p": 1, "q": 1}
    base = config_from_dict(base_raw, base_dir)
    spec = SweepSpec(base, alphas, resonances, Path(args.out), window, smooth, tol)
    manifest = run_sweep(spec, args.workers)
    summary = summarize(manifest)
    (spec.output_dir / "summary.csv").write_text(summary, encoding="utf-8")
    print(summary, end="")
    if args.svg:
        _sweep_plots(spec, manifest, raw)
    for run in manifest.failed:
        print(f"run {run['dir']} failed: {run['error']}", file=sys.stderr)
    return EXIT_NUMERIC if manifest.failed else EXIT_OK


def _sweep_plots(spec, manifest, raw) -> None:
    from .core import WaveState
    from .svg import line_plot

    ok = [r for r in manifest.runs if not r.get("error")]
    labels = [f"alpha={r['alpha']:g} p/q={r['p']}/{r['q']}" for r in ok]
    sig = [TimeSeries.from_csv(spec.output_dir / r["series"]) for r in ok]
    line_plot([(s.n[1:], s.sigma[1:]) for s in sig], labels, spec.output_dir / "sigma.svg",
              logx=True, logy=True, xlabel="n", ylabel="sigma")
    log_scale = str(raw.get("plot", {}).get("log_scale", "no")).lower() in ("yes", "true", "1")
    finals = [WaveState.from_csv(spec.output_dir / r["final"]) for r in ok]
    line_plot([(f.momenta, f.probabilities) for f in finals], labels,
              spec.output_dir / "profiles.svg", logy=log_scale, xlabel="l", ylabel="P_l")


def cmd_compare(args) -> int:
    raw, base_dir = _effective(args)
    cfg = config_from_dict(raw, base_dir)
    r = cfg.resonance
    table = PhaseTable.for_resonance(r)
    kicks = kick_strengths(cfg.schedule, cfg.steps)
    n_stars = cumulative_kicks(cfg.schedule, cfg.steps)
    banded = spectral = start_state(cfg)
    analytic = iter(analytic_states(cfg.initial, n_stars[1:], cfg.tail_tol, 1)) \
        if r.is_primary() else None
    every = args.every or max(1, cfg.steps // 20)
    header = "step   banded-spectral" + ("   banded-analytic" if analytic else "") + \
        "   t_banded[s]  t_spectral[s]"
    print(header)
    worst = 0.0
    tb_total = ts_total = 0.0
    for n in range(1, cfg.steps + 1):
        k = float(kicks[n - 1])
        t0 = time.perf_counter()
        banded = step_banded(banded, r, k, table, cfg.tail_tol, cfg.truncation)
        t1 = time.perf_counter()
        spectral = step_spectral(spectral, r, k, table, None, cfg.tail_tol, cfg.truncation)
        t2 = time.perf_counter()
        tb_total += t1 - t0
        ts_total += t2 - t1
        d_bs = max_amplitude_difference(banded, spectral)
        worst = max(worst, d_bs)
        line = f"{n:>5}   {d_bs:15.3e}"
        if analytic:
            d_ba = max_amplitude_difference(banded, next(analytic))
            worst = max(worst, d_ba)
            line += f"   {d_ba:15.3e}"
        line += f"   {t1 - t0:11.2e}  {t2 - t1:13.2e}"
        if n % every == 0 or n == cfg.steps:
            print(line)
    print(f"max discrepancy {worst:.3e} (tolerance {COMPARE_TOL:.0e}); "
          f"total time banded {tb_total:.3f} s, spectral {ts_total:.3f} s")
    if worst > COMPARE_TOL:
        print("back-ends diverge", file=sys.stderr)
        return EXIT_DIVERGE
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validate import format_report, run_checks

    results = run_checks()
    print(format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATE


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kickedrotor",
                                     description="Resonant quantum kicked rotor simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run one evolution, write series.csv and final.csv")
    _add_run_flags(p)
    p.add_argument("--out", default="run_output", help="output directory")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("profile", help="write the momentum distribution at one step")
    _add_run_flags(p)
    p.add_argument("--at-step", type=int, default=300)
    p.add_argument("--out", default="profile.csv", help="output CSV (l,prob)")
    p.add_argument("--svg", help="also write an SVG plot here")
    p.add_argument("--log", action=argparse.BooleanOptionalAction, default=None,
                   help="logarithmic vertical axis in the SVG")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("fit", help="fit the spreading exponent of a series.csv")
    p.add_argument("series")
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--smooth", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep", help="run a grid of alpha values and resonances")
    _add_run_flags(p)
    p.add_argument("--alphas", help="comma-separated alpha values")
    p.add_argument("--resonances", help="comma-separated p/q values, e.g. 1/1,2/5")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="sweep_output")
    p.add_argument("--svg", action="store_true", help="write sigma.svg and profiles.svg")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="cross-check the back-ends step by step")
    _add_run_flags(p)
    p.add_argument("--every", type=int, default=None, help="print every k-th step")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="run the built-in identity checks")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FitError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, TruncationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except KickedRotorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
