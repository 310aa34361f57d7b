# %% [markdown]
# # Cauchy kicks and Born probabilities
#
# A spin entering at angle theta receives a rotation phi drawn from a Cauchy
# law of scale a.  Summing the density over all kicks that produce UP or DOWN
# gives probabilities whose ratio is tan^2(theta/2) for small a.

# %%
import math

import numpy as np

from specialstate import kicks
from specialstate.kicks import KickModel

for theta in (0.1, 0.5, 1.0, 2.0, 3.0):
    p = kicks.outcome_probabilities(KickModel(1e-4, theta))
    print(f"theta={theta:3.1f}  p_down/p_up={p.ratio:.6f}  tan^2(theta/2)={math.tan(theta / 2) ** 2:.6f}")

# %% Larger a departs from the Born rule
for a in (1e-3, 0.1, 0.3):
    print(f"a={a:5}: ratio at theta=pi/3 is {kicks.outcome_probabilities(KickModel(a, math.pi / 3)).ratio:.5f}")

# %% Mean kick given the outcome
# The UP series agrees with the closed form.  The DOWN series converges to
# +sin^3 cos, opposite in sign to the closed form used for angle optimisation.
for theta in (0.5, math.pi / 2, 2.5):
    ser = kicks.conditional_kick_expectation(KickModel(1e-6, theta), "series")
    clo = kicks.conditional_kick_expectation(KickModel(1e-6, theta), "closed")
    print(f"theta={theta:.3f} series=({ser[0]:+.5f}, {ser[1]:+.5f}) closed=({clo[0]:+.5f}, {clo[1]:+.5f})")

# %% Best entry angle
for mode in ("sorted", "total"):
    opt = kicks.optimize_entry_angle(mode)
    print(f"{mode:>6}: theta* = {opt.degrees:.2f} deg")

# %% Averaging does not help
# Means of 100 Cauchy draws have the same law as one draw.
for dist in ("cauchy", "gaussian"):
    rep = kicks.self_averaging_test(0.01, 100, 10_000, seed=0, distribution=dist)
    print(f"{dist:>8}: KS p-value {rep.pvalue:.3g}")

# %% Partial fractions of the cotangent
for n in (10**2, 10**4, 10**6):
    print(f"n_max={n:>7}: |cot z - sum| = {kicks.cot_identity_residual(1.0, 0.1, n):.2e}")
