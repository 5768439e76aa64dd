# %% [markdown]
# # Incomplete elliptic integral of the second kind
#
# `ellint_e_incomplete(u, m)` is built on Carlson's symmetric forms and
# accepts any real amplitude and any m <= 1, including negative m (which
# is what an ellipse with a > b produces). Here it is checked against a
# plain adaptive-Simpson quadrature of sqrt(1 - m sin^2).

# %%
import numpy as np

from phasebalance.specfun import ellint_e_complete, ellint_e_incomplete, oracle_e_cumulative

u = np.linspace(-np.pi, np.pi, 2001)
for m in (-5, -3, -1, 0, 0.5, 0.9):
    err = np.max(np.abs(ellint_e_incomplete(u, m) - oracle_e_cumulative(u, m)))
    print(f"m = {m:5}: max |Carlson - quadrature| = {err:.1e}")

# %% [markdown]
# Quarter perimeter of the 2 x 1 ellipse, b E(pi/2 | 1 - (a/b)^2) with b = 1.

# %%
print("E(pi/2 | -3) =", ellint_e_complete(-3.0))

# %% [markdown]
# Past a quarter period the integral is quasi-periodic:
# E(u + pi | m) = E(u | m) + 2 E(m).

# %%
m = -0.5625
print(ellint_e_incomplete(7.0, m) - ellint_e_incomplete(7.0 - np.pi, m), 2 * ellint_e_complete(m))
