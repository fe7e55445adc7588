"""Crossing certificates: how small must the impulse width be?

For each built-in scenario the certificate bounds the fields F1 (geodesic
quadratic drag) and F2 (half the profile gradient) over coordinate balls
around the shock-crossing state, and turns them into a contraction scale
alpha.  Any width eps <= eps0 = alpha/2 is guaranteed to carry the
trajectory through the strip.  The fixed-point iteration that proves it is
then run and compared against the adaptive integrator.
"""

import numpy as np

from impulse_geo import (background_geodesic, builtin_scenarios, certify,
                         integrate_impulsive_geodesic, mollifier_net,
                         picard_solve, weissinger_budget)

net = mollifier_net()

print(f"{'scenario':46s} {'alpha':>9s} {'eps0':>9s} {'picard-vs-RK':>13s}")
for scen in builtin_scenarios():
    base = background_geodesic(scen.model, scen.data.x0, scen.data.xdot0,
                               -1.0, 0.0)
    cert = certify(scen.model, scen.profile, base.x_at(0.0),
                   base.xdot_at(0.0), b=scen.b, c=scen.c, k=net.l1_bound)

    eps = cert.eps0 / 2
    entry = background_geodesic(scen.model, scen.data.x0, scen.data.xdot0,
                                -1.0, -eps)
    res = picard_solve(scen.model, scen.profile, net, eps,
                       entry.x_at(-eps), entry.xdot_at(-eps), cert.alpha)
    path = integrate_impulsive_geodesic(scen.model, scen.profile, net, eps,
                                        scen.data, u_end=cert.alpha)
    sub = np.linspace(0, len(res.t) - 1, 51).astype(int)
    err = max(np.max(np.abs(path.x_at(res.t[sub]) - res.x[sub])),
              np.max(np.abs(path.xdot_at(res.t[sub]) - res.xdot[sub])))
    print(f"{scen.name:46s} {cert.alpha:9.4f} {cert.eps0:9.4f} {err:13.2e}")

# the contraction budget for a stiff certificate: the n-step constants
# decay factorially, so even large Lipschitz numbers cost few iterations
sums = weissinger_budget(alpha=1.0, lip_F1=100.0, lip_F2=50.0, k=1.5)
print("\ncontraction series partial sums (alpha=1, Lip=100):")
print("  n=2..6:", np.array2string(sums[:5], precision=3))
print("  limit :", sums[-1])
