# %% [markdown]
# # Special states of a ten-level system
#
# Ten degenerate levels share a 100-level band.  For an initial state inside
# the excited subspace the survival at time t0 is <psi|C^dagger C|psi> with C the
# excited block of exp(-iHt0).  Eigenvectors of C^dagger C with eigenvalues
# near 1 (near 0) stay excited (decay completely) at t0, while a typical state
# ends up half decayed.

# %%
import numpy as np

from specialstate import special

t0 = 16.0
model = special.multilevel_model(n=10, N=100)
states = special.special_states(model, t0)
print("eigenvalues of C^dagger C:", np.round(states.eigenvalues, 4))
print(f"mean survival at t0: {states.eigenvalues.mean():.3f}")
print(f"fraction within 0.1 of 0 or 1: {special.cluster_fraction(states):.2f}")

# %% Survival curves of the extreme eigenvectors against the average
times = np.linspace(0, 40, 9)
avg = special.average_survival(model, times)
top = special.specialness_trace(model, 0, t0, times, states=states)
bottom = special.specialness_trace(model, 9, t0, times, states=states)
print(" t     average   top      bottom")
for row in zip(times, avg.values, top.values, bottom.values):
    print("{:4.0f}  {:8.4f} {:8.4f} {:8.4f}".format(*row))

# %% Constant couplings matter
# Random phases on the couplings spread the spectrum away from 0 and 1.
rng = np.random.default_rng(0)
noisy = special.multilevel_model(phases=rng.uniform(0, 2 * np.pi, (10, 100)))
print(f"cluster fraction with random phases: "
      f"{special.cluster_fraction(special.special_states(noisy, t0)):.2f}")
