# %% [markdown]
# # Decay of one level into a finite band
#
# A single excited level sits in the middle of 100 equally spaced band levels
# and couples to each with the same strength.  The survival probability shows
# three regimes: a quadratic start, exponential decay and, because the band is
# finite, a revival near the period 2 pi / spacing.

# %%
import numpy as np

from specialstate import decay

model = decay.canonical_model(N=100, recurrence=300.0, zeno=7.0)
times = np.linspace(0.0, 600.0, 6001)
curve = decay.survival_curve(model, decay.excited_state(model), times)

# %% Quadratic start: S = 1 - (t / tau)^2
d = decay.diagnose(model, curve)
print(f"Zeno time from the energy spread: {d.zeno_time:.3f}")
print(f"Zeno time from a quadratic fit:   {d.fitted_zeno_time:.3f}")

# %% Exponential regime
print(f"golden-rule slope {d.golden_rule_slope:.4f}, fitted slope {d.fitted_slope:.4f}")
print(f"RMS deviation of log S from a line: {d.loglinear_rms_residual:.2%}")
for t in (20, 50, 100, 150):
    print(f"  S({t:>3}) = {curve.at(t):.4f}   exp(slope t) = {np.exp(d.golden_rule_slope * t):.4f}")

# %% Revival
# The revival pulse leaves the band at T_rec and is re-absorbed by the level
# over about 2/Gamma, so the peak lands a little after T_rec.
print(f"recurrence time {d.recurrence_time:.0f}; peak S = {d.recurrence_peak_value:.3f} "
      f"at t = {d.recurrence_peak_time:.1f}")
