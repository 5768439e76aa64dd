# %% [markdown]
# # Three agents balancing on the unit circle
#
# The bundled `exp-circle` scenario: r = 1, delta = 1, Kc = 1, K = 2.
# After transients the agents sit on the circle a third of a lap apart and
# turn at 1 rad/s.

# %%
import numpy as np

from phasebalance.config import bundled_path, load_scenario
from phasebalance.sim import pairwise_phase_gaps, run

sc = load_scenario(bundled_path("exp-circle"))
log = run(sc)
print("wall time      ", round(log.wall_time, 1), "s")
print("max |e|        ", log.e_norm.max())
print("final gaps     ", pairwise_phase_gaps(log.psi[-1]))
print("mean u, last 10 s", log.mean_turn_rate(10.0))

# %%
for t_check in (0, 5, 10, 20, 50, 100):
    i = np.searchsorted(log.time, t_check - 1e-9)
    print(f"t = {log.time[i]:5.1f}  order parameter = {log.order_parameter[i]:.2e}")
