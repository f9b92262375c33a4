# %% [markdown]
# # Secondary resonance p/q = 2/5
#
# The free phase exp(-4 pi i (p/q) j^2) now depends on j mod q, and there
# is no closed form.  Both numeric back-ends agree to rounding.

# %%
from kickedrotor import (Backend, DeltaAt, PowerLaw, RunConfig, classify, evolve, fit_gamma,
                         make_resonance, max_amplitude_difference)

r = make_resonance(2, 5)
cfg = RunConfig(r, PowerLaw(1.0, 0.1), DeltaAt(0), steps=50)
b = evolve(cfg)
s = evolve(cfg.replace(backend=Backend.SPECTRAL))
print("banded vs spectral after 50 steps:", max_amplitude_difference(b.final, s.final))

# %% [markdown]
# Exponent ladder.  Fits over the last 100 steps; note how the apparent
# exponent still drifts between n = 300 and n = 1000.

# %%
for steps in (300, 1000):
    for alpha in (-0.1, 0.0, 0.1, 0.2):
        series = evolve(RunConfig(r, PowerLaw(1.0, alpha), DeltaAt(0), steps)).series
        fit = fit_gamma(series)
        print(f"N {steps:5d}  alpha {alpha:5.2f}  gamma {fit.gamma:6.3f}  {classify(fit).value}")
