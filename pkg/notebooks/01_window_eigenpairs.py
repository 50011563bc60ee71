# %% [markdown]
# # Eigenpairs inside an eigenvalue window
#
# We take the shipped 16x16 test matrix, pick an interval that holds two of
# its eigenvalues, and compare three things: the bare phase-estimation
# distribution, the same distribution after amplitude amplification, and the
# estimates recovered from a finite number of shots.

# %%
from importlib import resources

import numpy as np

from qpes import build_phase_map, eig_oracle, load_matrix, run_pes
from qpes.estimator import budget_pes, estimate_eigenpairs
from qpes.statevector import register_probabilities, sample

a = load_matrix(resources.files("qpes") / "data" / "n16_k2.json")
spec = eig_oracle(a)
print(np.round(spec.eigenvalues, 4))

# %% [markdown]
# The eigenvalues sit on the grid of an m = 6 exponential phase map with
# alpha = 1, so phase estimation is exact. The interval [-0.21875, -0.03125)
# brackets the two grid values -0.1875 and -0.0625.

# %%
pm = build_phase_map(1.0, 6, "exponential")
interval = (-0.21875, -0.03125)
res = run_pes(a, 0, pm, interval)
print("k =", res.good.k, " p0 =", round(res.plan.p0, 4), " rounds =", res.plan.t)
print("good mass before:", round(res.plan.p0, 4), " after:", round(res.good_probability, 4))

# %%
before = register_probabilities(res.initial, res.initial.layout.phase)
after = register_probabilities(res.state, res.state.layout.phase)
for phi in np.flatnonzero(before > 1e-12):
    mark = "*" if any(phi in w for w in res.windows) else " "
    print(f"{mark} phi={phi:2d}  lambda={pm.measured_to_lambda(phi):+.4f}  "
          f"CES {before[phi]:.4f}  PES {after[phi]:.4f}")

# %% [markdown]
# Sampling with the Hoeffding budget and dividing by |c|^2 gives back
# |v_0j|^2 for the two window eigenvectors (both equal 0.09 here).

# %%
budget = budget_pes(res.good.k, gamma=0.1, zeta=0.05)
counts = sample(res.state, res.state.layout.phase, budget.shots, seed=7)
for e in estimate_eigenpairs(counts, res.plan, pm, res.windows):
    if e.is_leakage:
        print(f"outside window: {e.raw_fraction:.3f} of {e.shots} shots")
    else:
        print(f"lambda_hat={e.lambda_hat:+.4f}  |v|^2 hat={e.amp_sq_hat:.4f} +- {e.ci_halfwidth:.4f}")
