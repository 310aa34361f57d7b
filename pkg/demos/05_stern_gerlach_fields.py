# %% [markdown]
# # Field of a finite two-wire magnet surrogate
#
# Two straight wires at x = +-s, length L, closed by semicircles, carry a
# clockwise current.  Atoms fly along y at height z.  The straight-wire field
# and its x-gradient have closed forms; the whole contour is integrated
# numerically.

# %%
import numpy as np

from specialstate import fields

loop = fields.WireLoop(s=1.5e-3, L=0.035, I=10.0)
z = 2e-3
for y in (-0.03, -0.0175, -0.01, 0.0):
    R = (0.0, y, z)
    B = fields.biot_savart_quadrature(loop, R)
    straight = fields.straight_wire_field(loop, y, z)
    print(f"y={y:+.4f}  B={np.array2string(B, precision=3)}  straight-wire Bz={straight[2]:.4e}")

# %% On the plane x = 0 the mirror symmetry x -> -x leaves no x component
B_entry = fields.biot_savart_quadrature(loop, (0.0, -0.02, z), pieces=("L",))
print("entry semicircle alone at x=0:", B_entry)
print("reference closed form for its Bx:", fields.semicircle_bx(loop, -0.02 + loop.L / 2, z))

# %% Dimensionless bracket
s_star, value = fields.bracket_maximum(np.linspace(0.05, 3.0, 60))
print(f"bracket maximum {value:.4f} at s/z = {s_star:.4f}")

# %% How big must a one-shot kick be?
for dt in (1e-6, 1e-16):
    print("\n".join(fields.kick_estimates(dt).lines()), end="\n\n")
