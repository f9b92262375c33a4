# %% [markdown]
# # Momentum profiles at n = 300
#
# Ballistic and faster spreading leaves two fronts; large alpha freezes
# the wave packet into a narrow Bessel peak.

# %%
from pathlib import Path

import numpy as np

from kickedrotor import Backend, DeltaAt, PowerLaw, RunConfig, evolve, make_resonance
from kickedrotor.observables import gaussian_gof_pvalue, profile_widths
from kickedrotor.svg import line_plot

out = Path("demo_output")
out.mkdir(exist_ok=True)

curves, labels = [], []
for alpha in (-0.1, 0.0, 0.5, 1.0, 2.0):
    final = evolve(RunConfig(make_resonance(1, 1), PowerLaw(1.0, alpha), DeltaAt(0), 300,
                             backend=Backend.ANALYTIC)).final
    peak, support = profile_widths(final)
    print(f"alpha {alpha:5.2f}  outer-peak distance {peak:6g}  support(1e-10) {support}")
    curves.append((final.momenta, final.probabilities))
    labels.append(f"alpha = {alpha:g}")
line_plot(curves, labels, out / "profiles_primary.svg", xlabel="l", ylabel="P_l")

# %% [markdown]
# sigma ~ n^0.5 at alpha = 0.5, yet the shape is far from Gaussian.

# %%
final = evolve(RunConfig(make_resonance(1, 1), PowerLaw(1.0, 0.5), DeltaAt(0), 300,
                         backend=Backend.ANALYTIC)).final
print("chi-square p-value vs Gaussian:", gaussian_gof_pvalue(final))

# %% [markdown]
# Secondary resonance profiles span many decades, so use a log axis.

# %%
curves = []
for alpha in (-0.1, 0.0, 0.1, 0.2):
    f = evolve(RunConfig(make_resonance(2, 5), PowerLaw(1.0, alpha), DeltaAt(0), 300)).final
    p = np.maximum(f.probabilities, 1e-30)
    curves.append((f.momenta, p))
line_plot(curves, [f"alpha = {a:g}" for a in (-0.1, 0.0, 0.1, 0.2)],
          out / "profiles_2_5.svg", logy=True, xlabel="l", ylabel="P_l")
print("wrote", sorted(x.name for x in out.glob("*.svg")))
