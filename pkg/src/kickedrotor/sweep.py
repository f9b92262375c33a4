"""Parameter sweeps over the kick exponent and the resonance.

Each (alpha, p/q) pair is one independent run written to its own directory::

    output_dir/
        manifest.json
        run_<alpha>_<p>_<q>/series.csv   # n,n_star,m1,m2,sigma,norm_error
        run_<alpha>_<p>_<q>/final.csv    # l,re,im,prob
        run_<alpha>_<p>_<q>/meta.json    # effective RunConfig

Run files depend only on the configuration, so repeated sweeps (and sweeps
with a different number of workers) produce byte-identical run files.
"""

from __future__ import annotations

import datetime as _dt
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .config import config_to_dict, dump_json
from .core import (Backend, KickedRotorError, PowerLaw, ResonanceParams, RunConfig,
                   ValidationError)
from .observables import FitModel, classify, fit_gamma, predicted_gamma
from .propagator import evolve

__all__ = ["SweepSpec", "SweepManifest", "run_sweep", "summarize", "run_dirname"]

SUMMARY_HEADER = "alpha,p,q,gamma,regime,predicted_gamma,residual"


@dataclass(frozen=True)
class SweepSpec:
    """``base`` supplies everything but the exponent and the resonance."""

    base: RunConfig
    alpha_values: Sequence[float]
    resonances: Sequence[ResonanceParams]
    output_dir: Path
    window: int = 100
    smooth: int | None = None
    classify_tol: float = 0.05

    def __post_init__(self):
        if len(self.alpha_values) == 0:
            raise ValidationError("sweep needs at least one alpha value")
        if len(self.resonances) == 0:
            raise ValidationError("sweep needs at least one resonance")
        object.__setattr__(self, "alpha_values", tuple(float(a) for a in self.alpha_values))
        object.__setattr__(self, "resonances", tuple(self.resonances))
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    def kappa0(self) -> float:
        return getattr(self.base.schedule, "kappa0", 1.0)

    def run_configs(self) -> list[tuple[float, RunConfig]]:
        out = []
        for r in self.resonances:
            backend = self.base.backend
            if backend is Backend.ANALYTIC and not r.is_primary():
                backend = Backend.BANDED
            for alpha in self.alpha_values:
                cfg = self.base.replace(resonance=r, schedule=PowerLaw(self.kappa0(), alpha),
                                        backend=backend)
                out.append((alpha, cfg))
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "base": config_to_dict(self.base),
            "alpha_values": list(self.alpha_values),
            "resonances": [f"{r.p}/{r.q}" for r in self.resonances],
            "window": self.window,
            "smooth": self.smooth,
            "classify_tol": self.classify_tol,
            "output_dir": str(self.output_dir),
        }


@dataclass
class SweepManifest:
    spec: dict[str, Any]
    runs: list[dict[str, Any]] = field(default_factory=list)
    version: str = __version__
    timestamp: str = ""

    @property
    def failed(self) -> list[dict[str, Any]]:
        return [r for r in self.runs if r.get("error")]

    def to_dict(self) -> dict[str, Any]:
        return {"spec": self.spec, "runs": self.runs, "version": self.version,
                "timestamp": self.timestamp}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SweepManifest":
        return cls(d.get("spec", {}), list(d.get("runs", [])), d.get("version", ""),
                   d.get("timestamp", ""))


def run_dirname(alpha: float, r: ResonanceParams) -> str:
    return f"run_{alpha:+.4f}_{r.p}_{r.q}"


def _run_one(args) -> dict[str, Any]:
    alpha, cfg, out_dir, window, smooth, tol = args
    r = cfg.resonance
    run_dir = Path(out_dir) / run_dirname(alpha, r)
    entry: dict[str, Any] = {
        "alpha": alpha, "p": r.p, "q": r.q, "dir": run_dir.name,
        "series": f"{run_dir.name}/series.csv", "final": f"{run_dir.name}/final.csv",
        "meta": f"{run_dir.name}/meta.json", "backend": cfg.backend.value,
        "gamma": None, "regime": None, "model": None, "residual": None,
        "leaked_norm": None, "final_sigma": None, "error": None,
    }
    t0 = time.perf_counter()
    try:
        run_dir.mkdir(parents=True, exist_ok=True)
        (run_dir / "meta.json").write_text(dump_json({"config": config_to_dict(cfg)}),
                                           encoding="utf-8")
        series, final, _ = evolve(cfg)
        series.to_csv(run_dir / "series.csv")
        final.to_csv(run_dir / "final.csv")
        entry["leaked_norm"] = final.leaked_norm
        entry["final_sigma"] = float(series.sigma[-1])
        if len(series) - 1 >= window:
            fit = fit_gamma(series, window, smooth)
            entry.update(gamma=fit.gamma, regime=classify(fit, tol).value,
                         model=fit.model.value, residual=fit.rms_residual)
    except KickedRotorError as exc:
        entry["error"] = f"{type(exc).__name__}: {exc}"
    entry["wall_time"] = time.perf_counter() - t0
    return entry


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepManifest:
    """Run every (alpha, resonance) pair and write the per-run files and ``manifest.json``.

    Failures are recorded in the manifest entry's ``error`` field; the other
    runs still complete.
    """
    if workers < 1:
        raise ValidationError("workers must be >= 1")
    spec.output_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(alpha, cfg, str(spec.output_dir), spec.window, spec.smooth, spec.classify_tol)
            for alpha, cfg in spec.run_configs()]
    if workers == 1 or len(jobs) == 1:
        runs = [_run_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_one, jobs))
    manifest = SweepManifest(spec.to_dict(), runs, __version__,
                             _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    (spec.output_dir / "manifest.json").write_text(dump_json(manifest.to_dict()),
                                                   encoding="utf-8")
    return manifest


def _predicted_cell(alpha: float, q: int) -> str:
    if q != 1:
        return "n/a"
    gamma, logarithmic = predicted_gamma(alpha)
    return "log" if logarithmic else format(gamma, ".17g")


def summarize(manifest: SweepManifest) -> str:
    """Flat CSV joining measured fits with the primary-resonance prediction."""
    lines = [SUMMARY_HEADER]
    for run in manifest.runs:
        gamma = "" if run.get("gamma") is None else format(run["gamma"], ".17g")
        residual = "" if run.get("residual") is None else format(run["residual"], ".17g")
        regime = run.get("regime") or ("error" if run.get("error") else "")
        if run.get("model") == FitModel.LOGARITHMIC.value and regime:
            regime = "logarithmic"
        lines.append(f"{format(run['alpha'], '.17g')},{run['p']},{run['q']},{gamma},{regime},"
                     f"{_predicted_cell(run['alpha'], run['q'])},{residual}")
    return "\n".join(lines) + "\n"
