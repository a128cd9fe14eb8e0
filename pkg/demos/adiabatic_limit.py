"""
From Aharonov-Anandan to Berry phases as the drive slows down.

For small omega each cyclic state approaches an eigenvector of H~ and its A-A
phase approaches the Berry phase of that level. The adiabaticity metric is
linear in omega, so the gap closes at the same rate.
"""

from phaselab.adiabatic import adiabaticity_metric, berry_phase, energy_groups
from phaselab.spin import make_model
from phaselab.verify import adiabatic_distances

gamma, h = 0.5, 0.4
model = make_model(gamma, h, 1.0)
for k, level in enumerate(energy_groups(model)):
    if level.dimension == 1:
        print(f"E = {level.energy:+.6f}  Berry phase {berry_phase(model, k):+.6f}")

omegas = (0.1, 0.03, 0.01, 0.003)
print("omega:", omegas)
for level, dist in adiabatic_distances(gamma, h, omegas).items():
    print(f"level {level}: |A-A - Berry| =", " ".join(f"{d:.4f}" for d in dist))
for w in omegas:
    print(f"omega = {w:<6} metric = {adiabaticity_metric(make_model(gamma, h, w)):.5f}")
