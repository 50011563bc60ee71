# %% [markdown]
# # Worst-case cost curves
#
# All hidden constants are set to 1 and every tolerance and gap scales as
# 1/N. Only the slopes and the ordering mean anything; absolute values and
# crossover sizes depend on the unit constants.

# %%
from pathlib import Path

from qpes.complexity import plot_study, scaling_study

study = scaling_study(2 ** 10, 2 ** 20, curves="both")
for name in ("query", "with-sampling"):
    print(name)
    for method, sl in study.slopes(name).items():
        print(f"  {method:8s} slope {sl['slope']:.3f}   without the log factor {sl['slope_log_free']:.3f}")

# %%
out = Path("scaling.svg")
plot_study(study, out)
print("wrote", out.resolve())

# %% [markdown]
# Over this range the ordering never changes, so no crossovers are found.
# Starting the range lower shows where the quantum curves overtake.

# %%
small = scaling_study(4, 2 ** 12, curves="query")
for x in small.crossovers:
    print(f"{x.first} / {x.second} cross near N = {x.N:.1f}")
