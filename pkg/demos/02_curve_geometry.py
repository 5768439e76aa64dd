# %% [markdown]
# # Curve geometry seen from the heading
#
# An agent travelling counter-clockwise is associated with the curve point
# whose tangent is parallel to its heading. Everything the controller needs
# (curvature, arc length, phase) is a function of that heading alone.

# %%
import numpy as np

from phasebalance.curve import CurveSpec, curvature, curve_phase, offset_boundary, perimeter, project

ell = CurveSpec.ellipse(2.0, 1.0)
for th in np.linspace(0, 2 * np.pi, 9)[:-1]:
    t = project(ell, th)
    print(f"heading {th:5.3f}  t = {t:+.3f}  kappa = {curvature(ell, th):.4f}  psi = {curve_phase(ell, th):.4f}")

# %% [markdown]
# Perimeter: closed form via E versus Ramanujan's approximation.

# %%
print("exact     ", perimeter(ell, "exact"))
print("Ramanujan ", perimeter(ell, "ramanujan"))

# %% [markdown]
# The band |e| < delta around the curve, drawn when matplotlib is present.

# %%
outer, inner = offset_boundary(ell, 0.4, 400)
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    t = np.linspace(0, 2 * np.pi, 400)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(2 * np.cos(t), np.sin(t), "k")
    ax.plot(*outer.T, "r--", lw=0.8)
    ax.plot(*inner.T, "r--", lw=0.8)
    ax.set_aspect("equal")
    fig.savefig("curve_band.png", dpi=120)
    print("wrote curve_band.png")
