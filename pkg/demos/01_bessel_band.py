# %% [markdown]
# # Bessel bands by backward recurrence
#
# Every kick couples momentum l to l + d with weight (-i)^d J_d(kappa).
# The whole band J_0 .. J_M comes out of one downward sweep.

# %%
import numpy as np

from kickedrotor.specfun import band_cutoff, bessel_band, bessel_table, signed_band

band = bessel_band(5.0, 20)
print("J_0..J_5 at x=5:", np.round(band.values[:6], 12))
print("normalization error:", band.normalization_error())

# %% [markdown]
# The useful band ends where the squared tail drops below a tolerance.
# Past |m| ~ x the values die off faster than exponentially.

# %%
for x in (1.0, 10.0, 100.0, 1000.0):
    print(f"x = {x:7g}   M(1e-14) = {band_cutoff(x, 1e-14):5d}   M(1e-30) = {band_cutoff(x, 1e-30):5d}")

# %% [markdown]
# Many arguments at once, e.g. the accumulated kick at every step of a run.

# %%
xs = np.linspace(0.0, 30.0, 7)
table = bessel_table(xs, 70)
print(table.shape, "row sums of J0^2 + 2 sum Jm^2:")
print(table[:, 0] ** 2 + 2 * np.sum(table[:, 1:] ** 2, axis=1))

# %%
m, kernel = signed_band(2.0, 1e-20)
print(f"kick kernel at kappa=2 spans d = -{m}..{m}; |kernel|^2 sums to {np.sum(np.abs(kernel) ** 2):.15f}")
