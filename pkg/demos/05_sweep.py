# %% [markdown]
# # A small sweep
#
# Every (alpha, p/q) pair is an independent run with its own directory,
# written the same way whatever the number of workers.

# %%
from pathlib import Path

from kickedrotor import DeltaAt, RunConfig, make_resonance
from kickedrotor.sweep import SweepSpec, run_sweep, summarize

base = RunConfig(initial=DeltaAt(0), steps=1000, backend="analytic")
spec = SweepSpec(base, [0.0, 0.5, 1.0], [make_resonance(1, 1), make_resonance(2, 5)],
                 Path("demo_output") / "sweep")
manifest = run_sweep(spec, workers=2)
print(summarize(manifest))

# %%
for run in manifest.runs:
    print(run["dir"], run["backend"], f"{run['wall_time']:.2f} s")
