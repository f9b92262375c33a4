# %% [markdown]
# # Primary resonance: closed form and numerics
#
# At tau = 2 pi the free evolution is trivial, so the amplitudes after n
# kicks depend only on the accumulated kick n* = sum kappa(m).  Starting
# from l = 0 they are Bessel functions of n*, and sigma = n* / sqrt(2).

# %%
import math

import numpy as np

from kickedrotor import (Backend, DeltaAt, PowerLaw, RunConfig, analytic_amplitudes, classify,
                         evolve, fit_gamma, make_resonance, max_amplitude_difference,
                         predicted_gamma)

r = make_resonance(1, 1)

# %% [markdown]
# Same run, three back-ends.

# %%
cfg = RunConfig(r, PowerLaw(1.0, 0.5), DeltaAt(0), steps=200)
runs = {b: evolve(cfg.replace(backend=b)) for b in Backend}
ref = runs[Backend.ANALYTIC].final
for b, res in runs.items():
    print(f"{b.value:9s} sigma(200) = {res.series.sigma[-1]:.12f}   "
          f"max |a - a_analytic| = {max_amplitude_difference(res.final, ref):.1e}")
print("n*/sqrt2         =", runs[Backend.ANALYTIC].series.n_star[-1] / math.sqrt(2))

# %% [markdown]
# With kappa(n) = n^-alpha, n* grows like n^(1-alpha), so does sigma.
# At alpha = 1 the growth is logarithmic, above it sigma saturates.

# %%
for alpha in (-0.2, 0.0, 0.25, 0.5, 0.75, 1.0, 2.0):
    series = evolve(RunConfig(r, PowerLaw(1.0, alpha), DeltaAt(0), 1000,
                              backend=Backend.ANALYTIC)).series
    fit = fit_gamma(series)
    g, log = predicted_gamma(alpha)
    print(f"alpha {alpha:5.2f}  gamma {fit.gamma:7.4f}  model {fit.model.value:11s}  "
          f"regime {classify(fit).value:15s}  predicted {'log' if log else f'{g:.2f}'}")

# %% [markdown]
# The slow convergence at alpha = 0.75 is real: sum m^-0.75 = 4 n^0.25 + zeta(0.75) + ...
# and zeta(0.75) ~ -3.44 is not small next to 4 n^0.25 at n = 1000.

# %%
n = np.arange(901, 1001)
nstar = 4 * n ** 0.25 - 3.4434
print("local slope of 4 n^0.25 + zeta(0.75):", np.polyfit(np.log(n), np.log(nstar), 1)[0])

# %% [markdown]
# A single closed-form evaluation at large n* is cheap.

# %%
s = analytic_amplitudes(DeltaAt(0), 2500.0)
print("lattice", s.l_min, "..", s.l_max, " norm", s.norm)
