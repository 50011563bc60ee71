# %% [markdown]
# # Why the window pays for itself in shots
#
# Without the window every eigenpair carries weight about 1/N, so resolving
# one of them to relative accuracy gamma takes a number of shots that grows
# with N. After amplification the k window pairs share almost all the mass,
# and the shot count stops depending on N.

# %%
from qpes.estimator import empirical_shots_needed, true_weights
from qpes.fixtures import uniform_fixture
from qpes.amplification import run_pes
from qpes.statevector import register_probabilities

gamma = 0.2
print(f"{'N':>5} {'rounds':>6} {'PES shots':>10} {'CES shots':>10}")
for n in (16, 64, 256):
    fx = uniform_fixture(n, "exponential", k=2)
    res = run_pes(fx.matrix, 0, fx.phase_map, fx.interval)
    truth = true_weights(fx.spectrum, 0, fx.phase_map, res.good.indices)
    pes = empirical_shots_needed(register_probabilities(res.state, res.state.layout.phase),
                                 truth, res.plan.c_squared, fx.phase_map, gamma)
    ces = empirical_shots_needed(register_probabilities(res.initial, res.initial.layout.phase),
                                 truth, 1.0, fx.phase_map, gamma)
    print(f"{n:5d} {res.plan.t:6d} {pes:10d} {ces:10d}")

# %% [markdown]
# The PES column stays flat. The CES column grows roughly in proportion to N.
# The price is paid in circuit depth instead: the number of Grover rounds
# grows like sqrt(N/k).
