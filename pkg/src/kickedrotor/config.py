"""Reading and writing run configurations.

Two equivalent encodings are supported: an INI file with one section per
RunConfig field (hand-written configs and the shipped presets) and the JSON
dictionary echoed into every ``meta.json``.  Either can be fed back to the
command line.
"""

from __future__ import annotations

import configparser
import json
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .core import (Backend, Constant, Custom, DeltaAt, Explicit, PowerLaw, ResonanceParams,
                   RunConfig, TruncationPolicy, ValidationError, load_explicit_schedule)

PRESETS = ("fig_profiles_primary", "fig_sigma_2_5", "fig_profiles_2_5")


def config_to_dict(cfg: RunConfig) -> dict[str, Any]:
    s = cfg.schedule
    if isinstance(s, PowerLaw):
        schedule = {"kind": "power_law", "kappa0": s.kappa0, "alpha": s.alpha}
    elif isinstance(s, Constant):
        schedule = {"kind": "constant", "kappa0": s.kappa0}
    else:
        schedule = {"kind": "explicit", "values": list(s.values)}
    ic = cfg.initial
    if isinstance(ic, DeltaAt):
        initial = {"kind": "delta", "m": ic.m}
    else:
        initial = {"kind": "custom", "offset": ic.offset,
                   "amplitudes": [[float(a.real), float(a.imag)] for a in ic.amplitudes]}
    t = cfg.truncation
    return {
        "resonance": {"p": cfg.resonance.p, "q": cfg.resonance.q},
        "schedule": schedule,
        "initial": initial,
        "run": {"steps": cfg.steps, "backend": cfg.backend.value,
                "snapshot_steps": sorted(cfg.snapshot_steps), "tail_tol": cfg.tail_tol},
        "truncation": {"edge_threshold": t.edge_threshold, "growth_chunk": t.growth_chunk,
                       "max_halfwidth": t.max_halfwidth, "leak_budget": t.leak_budget},
    }


def _schedule_from(d: dict[str, Any], base_dir: Path | None = None):
    kind = str(d.get("kind", "power_law")).lower()
    if kind == "power_law":
        return PowerLaw(float(d.get("kappa0", 1.0)), float(d.get("alpha", 0.0)))
    if kind == "constant":
        return Constant(float(d.get("kappa0", 1.0)))
    if kind == "explicit":
        if "values" in d:
            vals = d["values"]
            if isinstance(vals, str):
                vals = [v for v in vals.replace(",", " ").split()]
            return Explicit(tuple(float(v) for v in vals))
        if "file" in d:
            path = Path(d["file"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return load_explicit_schedule(path)
        raise ValidationError("explicit schedule needs 'values' or 'file'")
    raise ValidationError(f"unknown schedule kind {kind!r}")


def _initial_from(d: dict[str, Any]):
    kind = str(d.get("kind", "delta")).lower()
    if kind == "delta":
        return DeltaAt(int(d.get("m", 0)))
    if kind == "custom":
        amps = d["amplitudes"]
        if isinstance(amps, str):
            amps = json.loads(amps)
        arr = np.array([complex(re, im) for re, im in amps])
        return Custom(arr, int(d.get("offset", 0)))
    raise ValidationError(f"unknown initial condition kind {kind!r}")


def _int_list(v) -> list[int]:
    if isinstance(v, str):
        return [int(x) for x in v.replace(",", " ").split()]
    return [int(x) for x in v]


def config_from_dict(d: dict[str, Any], base_dir: Path | None = None) -> RunConfig:
    try:
        res = d.get("resonance", {})
        run = d.get("run", {})
        trunc = d.get("truncation", {})
        defaults = TruncationPolicy()
        policy = TruncationPolicy(
            float(trunc.get("edge_threshold", defaults.edge_threshold)),
            int(trunc.get("growth_chunk", defaults.growth_chunk)),
            int(trunc.get("max_halfwidth", defaults.max_halfwidth)),
            float(trunc.get("leak_budget", defaults.leak_budget)),
        )
        return RunConfig(
            resonance=ResonanceParams(int(res.get("p", 1)), int(res.get("q", 1))),
            schedule=_schedule_from(d.get("schedule", {}), base_dir),
            initial=_initial_from(d.get("initial", {})),
            steps=int(run.get("steps", 100)),
            backend=Backend(str(run.get("backend", "banded")).lower()),
            truncation=policy,
            snapshot_steps=frozenset(_int_list(run.get("snapshot_steps", []))),
            tail_tol=float(run.get("tail_tol", 1e-30)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad configuration: {exc}") from exc


def read_ini(path_or_text: str | Path, is_text: bool = False) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if is_text:
        parser.read_string(str(path_or_text))
    else:
        with open(path_or_text, encoding="utf-8") as fh:
            parser.read_file(fh)
    return {name: dict(parser[name]) for name in parser.sections()}


def load_config_file(path: str | Path) -> dict[str, dict[str, Any]]:
    """Raw sectioned dictionary from an ``.ini`` or ``.json`` config."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    if path.suffix == ".json":
        data = json.loads(path.read_text(encoding="utf-8"))
        # meta.json wraps the config under "config"
        return data.get("config", data)
    return read_ini(path)


def load_preset(name: str) -> dict[str, dict[str, Any]]:
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files("kickedrotor.presets").joinpath(f"{name}.ini").read_text("utf-8")
    return read_ini(text, is_text=True)


def dump_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, full float precision."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
