"""
Degenerate cyclic groups of the x-driven model and their holonomies.

Driving about x leaves two twofold eigenvalues of B. On each group the
connection is a constant multiple of the identity, so the holonomy is a pure
phase exp(i phi) I. As h/omega grows the two angles move apart.
"""

import numpy as np

from phaselab import reference as ref
from phaselab.holonomy import aa_holonomy, cyclic_states, degenerate_connection, scalar_angle
from phaselab.spin import make_model

gamma, omega = 0.5, 0.5
for h in (0.0, 0.25, 0.5, 1.0, 2.0):
    model = make_model(gamma, h, omega, axis="x")
    b1, b2 = ref.x_spectrum_closed(gamma, h, omega)
    row = [f"h = {h:4.2f}"]
    for number, b in ((1, b1), (2, b2)):
        grp = next(g for g in cyclic_states(model) if g.dimension == 2 and abs(g.b_value - b) < 1e-9)
        angle = scalar_angle(aa_holonomy(model, grp).geometric_factor)
        row.append(f"group {number}: {angle:+.6f} (closed {ref.x_holonomy_closed(h, omega, number):+.6f})")
    print("  ".join(row))

# %% the connection itself, for one point
model = make_model(gamma, 0.5, omega, axis="x")
grp = next(g for g in cyclic_states(model) if g.dimension == 2)
print(np.round(degenerate_connection(model, grp), 10))
