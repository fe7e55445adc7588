"""Radial growth classification of wave profiles.

The classifier samples a profile along unit-speed radial geodesics and
fits the growth exponent on the outer radii.  Exponent 2 is the critical
value; the margin around it is 0.1.
"""

import numpy as np

from impulse_geo import (classify_growth, constant_profile, euclidean,
                         gaussian_bump_profile, hyperbolic_half_plane,
                         radial_power_profile)

model = euclidean(2)
directions = [np.array([1.0, 0.0]), np.array([0.0, 1.0]),
              np.array([1.0, 1.0]), np.array([-1.0, 0.5])]
radii = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]

cases = [
    ("|x|^1.5", radial_power_profile(1.0, 1.5)),
    ("|x|^2", radial_power_profile(1.0, 2.0)),
    ("|x|^3", radial_power_profile(1.0, 3.0)),
    ("constant", constant_profile(2.0)),
    ("gaussian", gaussian_bump_profile(5.0, [0.0, 0.0], 2.0)),
]
print(f"{'profile':10s} {'p_hat':>8s} {'stderr':>9s}  classification")
for name, prof in cases:
    rep = classify_growth(prof, model, [0.0, 0.0], directions, radii)
    print(f"{name:10s} {rep.exponent:8.3f} {rep.stderr:9.2e}  "
          f"{rep.classification}")

# on a curved wave surface the fit runs against geodesic distance, so a
# profile that is radial in chart coordinates is not geodesically radial:
# the half-plane chart radius outgrows the hyperbolic distance
model = hyperbolic_half_plane()
prof = radial_power_profile(1.0, 1.5, center=[0.0, 1.0])
rep = classify_growth(prof, model, [0.0, 1.0],
                      [np.array([1.0, 0.0]), np.array([0.0, 1.0])],
                      [0.5, 1.0, 2.0, 3.0, 4.0])
print(f"\nchart-radial |x-c|^1.5 on the half plane: p_hat={rep.exponent:.3f}"
      f" ({rep.classification}) against geodesic distance")
