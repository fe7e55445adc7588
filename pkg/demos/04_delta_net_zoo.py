"""The impulse regularization families and their verification gate.

Three built-ins: the symmetric mollifier, a one-sided variant supported in
(-eps, eps/2), and a genuinely signed combination with L1 norm up to 1.5.
Two deliberately broken families show that the gate localizes the failure:
a doubled net fails only the unit-integral trend, a frozen-support net
fails only the shrinking-support property.
"""

import numpy as np

from impulse_geo import (DeltaNet, asymmetric_net, mollifier_net, signed_net,
                         verify_strict_delta_net)

schedule = [2.0 ** -k for k in range(1, 9)]


def show(name, report):
    print(f"{name:12s} passed={report.passed!s:5s} "
          f"supports={report.supports_ok!s:5s} "
          f"integral={report.integral_ok!s:5s} l1={report.l1_ok!s:5s} "
          f"K_measured={report.k_measured:.6f}")


for net in (mollifier_net(), asymmetric_net(), signed_net()):
    show(net.name, verify_strict_delta_net(net, schedule))

base = mollifier_net()
doubled = DeltaNet(lambda e, u: 2.0 * base.eval(e, u),
                   lambda e, u: 2.0 * base.deriv(e, u),
                   lambda e: e, 2.0, name="doubled")
show("doubled", verify_strict_delta_net(doubled, schedule))

frozen = DeltaNet(lambda e, u: base.eval(1.0, u),
                  lambda e, u: base.deriv(1.0, u),
                  lambda e: 1.0, 1.0, name="frozen")
show("frozen", verify_strict_delta_net(frozen, [0.5, 0.25, 0.125]))

# the signed net really does go negative
eps = 0.25
grid = np.linspace(-eps, eps, 2001)
vals = signed_net().eval(eps, grid)
print("\nsigned net at eps=0.25: min value", float(vals.min()),
      "at u =", float(grid[np.argmin(vals)]))
