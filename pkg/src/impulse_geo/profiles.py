"""Wave profiles on the wave surface and strict families of impulse
regularizations.

A :class:`WaveProfile` is a scalar function ``f`` on chart coordinates
together with its coordinate differential ``df``.  A :class:`DeltaNet` is a
family ``delta_eps`` of smooth functions regularizing the unit impulse at
``u = 0``; the built-in nets satisfy the three strict-net properties by
construction:

(i)   supports shrink to zero, ``supp(delta_eps) in (-eps, eps)``;
(ii)  integrals tend to one;
(iii) L1 norms are uniformly bounded by a declared constant ``K``.

:func:`verify_strict_delta_net` measures the three properties with adaptive
quadrature, and :func:`classify_growth` estimates the radial growth
exponent of a profile by sampling along radial geodesics.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import dynamics, geometry
from .errors import IntegrationFailure, NumericalError

__all__ = [
    "WaveProfile", "constant_profile", "linear_profile",
    "quadratic_form_profile", "radial_power_profile",
    "gaussian_bump_profile", "metric_gradient",
    "DeltaNet", "mollifier_net", "asymmetric_net", "signed_net",
    "NetCheck", "NetVerificationReport", "verify_strict_delta_net",
    "GrowthSample", "GrowthReport", "classify_growth",
]

_FD_STEP = float(np.finfo(float).eps) ** (1.0 / 3.0)

# 1 / integral of exp(-1/(1-s^2)) over (-1, 1); normalizes the standard bump
_BUMP_NORM = 2.2522836210435810105


def _bump_scalar(s):
    if abs(s) >= 1.0:
        return 0.0
    return _BUMP_NORM * math.exp(-1.0 / (1.0 - s * s))


def _bump_prime_scalar(s):
    if abs(s) >= 1.0:
        return 0.0
    q = 1.0 - s * s
    return _BUMP_NORM * math.exp(-1.0 / q) * (-2.0 * s / (q * q))


def _bump_array(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1.0
    sm = s[m]
    out[m] = _BUMP_NORM * np.exp(-1.0 / (1.0 - sm * sm))
    return out


def _bump_prime_array(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1.0
    sm = s[m]
    q = 1.0 - sm * sm
    out[m] = _BUMP_NORM * np.exp(-1.0 / q) * (-2.0 * sm / (q * q))
    return out


class WaveProfile:
    """Scalar profile ``f`` with its coordinate differential.

    When no analytic gradient is supplied, ``df`` falls back to central
    finite differences of ``f`` with the usual cube-root step; the accuracy
    loss is acceptable for ``f`` but would not be for the impulse family,
    whose derivative is therefore always analytic for built-in nets.
    """

    def __init__(self, f, df=None, *, name="custom", params=None):
        self._f = f
        self._df = df
        self.analytic_grad = df is not None
        self.name = name
        self.params = dict(params or {})

    def __repr__(self):
        return f"WaveProfile({self.name!r})"

    def f(self, x):
        return float(self._f(np.asarray(x, dtype=float)))

    def df(self, x):
        x = np.asarray(x, dtype=float)
        if self._df is not None:
            return np.asarray(self._df(x), dtype=float)
        out = np.empty_like(x)
        for axis in range(x.size):
            step = _FD_STEP * max(1.0, abs(x[axis]))
            xp = x.copy()
            xp[axis] += step
            xm = x.copy()
            xm[axis] -= step
            out[axis] = (self._f(xp) - self._f(xm)) / (2.0 * step)
        return out


def constant_profile(value=1.0):
    v = float(value)
    return WaveProfile(lambda x: v, lambda x: np.zeros_like(x),
                       name="constant", params={"value": v})


def linear_profile(coeffs, offset=0.0):
    a = np.asarray(coeffs, dtype=float)
    b = float(offset)
    return WaveProfile(lambda x: float(a @ x) + b, lambda x: a.copy(),
                       name="linear", params={"coeffs": tuple(a), "offset": b})


def quadratic_form_profile(matrix, center=None):
    q = np.asarray(matrix, dtype=float)
    q = 0.5 * (q + q.T)
    c = None if center is None else np.asarray(center, dtype=float)

    def f(x):
        y = x if c is None else x - c
        return float(y @ q @ y)

    def df(x):
        y = x if c is None else x - c
        return 2.0 * (q @ y)

    return WaveProfile(f, df, name="quadratic_form",
                       params={"matrix": tuple(map(tuple, q)),
                               "center": None if c is None else tuple(c)})


def radial_power_profile(amplitude, exponent, center=None):
    a = float(amplitude)
    p = float(exponent)
    c = center

    def _y(x):
        return x if c is None else x - np.asarray(c, dtype=float)

    def f(x):
        return a * float(np.linalg.norm(_y(x))) ** p

    def df(x):
        y = _y(x)
        r = float(np.linalg.norm(y))
        if r == 0.0:
            return np.zeros_like(y)
        return a * p * r ** (p - 2.0) * y

    return WaveProfile(f, df, name="radial_power",
                       params={"amplitude": a, "exponent": p,
                               "center": None if c is None else tuple(c)})


def gaussian_bump_profile(amplitude, center, width):
    a = float(amplitude)
    c = np.asarray(center, dtype=float)
    w = float(width)

    def f(x):
        y = x - c
        return a * math.exp(-0.5 * float(y @ y) / (w * w))

    def df(x):
        y = x - c
        return (-a / (w * w)) * math.exp(-0.5 * float(y @ y) / (w * w)) * y

    return WaveProfile(f, df, name="gaussian_bump",
                       params={"amplitude": a, "center": tuple(c), "width": w})


def metric_gradient(profile, model, x):
    """Metric gradient ``(grad f)^k = h^{km} d_m f`` at ``x``."""
    x = np.asarray(x, dtype=float)
    return model.inverse_metric_at(x) @ profile.df(x)


class DeltaNet:
    """Family of smooth impulse regularizations indexed by the width eps.

    ``eval(eps, u)`` and ``deriv(eps, u)`` accept scalars or arrays.  The
    derivative is analytic for built-in nets: it scales like ``eps**-2``
    and finite-differencing it would be badly conditioned.
    ``support_radius(eps)`` never exceeds ``eps``; ``l1_bound`` is the
    declared uniform L1 constant ``K``.
    """

    def __init__(self, eval_fn, deriv_fn, support_radius, l1_bound, *,
                 name="custom"):
        self._eval = eval_fn
        self._deriv = deriv_fn
        self._support = support_radius
        self.l1_bound = float(l1_bound)
        self.name = name

    def __repr__(self):
        return f"DeltaNet({self.name!r}, K={self.l1_bound})"

    def eval(self, eps, u):
        return self._eval(float(eps), u)

    def deriv(self, eps, u):
        return self._deriv(float(eps), u)

    def support_radius(self, eps):
        return float(self._support(float(eps)))


def _scaled_net(shape_scalar, shape_array, dshape_scalar, dshape_array,
                l1_bound, name):
    def ev(eps, u):
        if np.isscalar(u):
            return shape_scalar(u / eps) / eps
        return shape_array(np.asarray(u, dtype=float) / eps) / eps

    def dv(eps, u):
        if np.isscalar(u):
            return dshape_scalar(u / eps) / (eps * eps)
        return dshape_array(np.asarray(u, dtype=float) / eps) / (eps * eps)

    return DeltaNet(ev, dv, lambda eps: eps, l1_bound, name=name)


def mollifier_net():
    """Symmetric nonnegative mollifier, unit integral for every eps (K = 1)."""
    return _scaled_net(_bump_scalar, _bump_array,
                       _bump_prime_scalar, _bump_prime_array, 1.0, "mollifier")


def asymmetric_net():
    """Nonnegative net with shape supported in (-1, 0.5), unit integral (K = 1)."""
    def shape_s(s):
        return _bump_scalar((s + 0.25) / 0.75) / 0.75

    def shape_a(s):
        return _bump_array((np.asarray(s) + 0.25) / 0.75) / 0.75

    def dshape_s(s):
        return _bump_prime_scalar((s + 0.25) / 0.75) / 0.75 ** 2

    def dshape_a(s):
        return _bump_prime_array((np.asarray(s) + 0.25) / 0.75) / 0.75 ** 2

    return _scaled_net(shape_s, shape_a, dshape_s, dshape_a, 1.0, "asymmetric")


def signed_net():
    """Genuinely signed net ``1.25 rho_a - 0.25 rho_b`` with K = 1.5.

    Both component shapes have unit integral, so the difference integrates
    to one exactly while dipping negative near s = 0.6.
    """
    def shape_s(s):
        return 1.25 * _bump_scalar(s) - 0.25 * _bump_scalar((s - 0.6) / 0.3) / 0.3

    def shape_a(s):
        s = np.asarray(s)
        return 1.25 * _bump_array(s) - 0.25 * _bump_array((s - 0.6) / 0.3) / 0.3

    def dshape_s(s):
        return (1.25 * _bump_prime_scalar(s)
                - 0.25 * _bump_prime_scalar((s - 0.6) / 0.3) / 0.09)

    def dshape_a(s):
        s = np.asarray(s)
        return (1.25 * _bump_prime_array(s)
                - 0.25 * _bump_prime_array((s - 0.6) / 0.3) / 0.09)

    return _scaled_net(shape_s, shape_a, dshape_s, dshape_a, 1.5, "signed")


@dataclass
class NetCheck:
    eps: float
    support_declared: float
    support_measured: float
    integral: float
    integral_err: float
    l1: float
    l1_err: float
    support_ok: bool
    indeterminate: bool


@dataclass
class NetVerificationReport:
    checks: list
    k_declared: float
    k_measured: float
    supports_ok: bool
    integral_ok: bool
    l1_ok: bool
    indeterminate: bool
    tol: float

    @property
    def passed(self):
        return self.supports_ok and self.integral_ok and self.l1_ok


def _measured_support(net, eps):
    declared = net.support_radius(eps)
    span = 1.5 * max(1.0, declared, eps)
    grid = np.linspace(-span, span, 8001)
    vals = np.abs(np.asarray(net.eval(eps, grid), dtype=float))
    peak = float(vals.max())
    if peak == 0.0:
        return 0.0
    nz = np.abs(grid[vals > 1e-13 * peak])
    return float(nz.max()) if nz.size else 0.0


def verify_strict_delta_net(net, eps_schedule, tol=1e-8):
    """Measure the three strict-net properties over a schedule of widths.

    The schedule must be strictly decreasing and positive.  Property (ii)
    is a limit statement, so it is checked as a trend: the deviations
    ``|integral - 1|`` must not grow along the schedule and must fall below
    ``tol`` at the smallest width.  Quadrature entries whose reported error
    exceeds the requested absolute tolerance by a wide margin are flagged
    indeterminate.
    """
    eps_schedule = [float(e) for e in eps_schedule]
    if not eps_schedule or any(e <= 0 for e in eps_schedule):
        raise ValueError("eps schedule must be positive")
    if any(b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
        raise ValueError("eps schedule must be strictly decreasing")

    checks = []
    for eps in eps_schedule:
        declared = net.support_radius(eps)
        measured = _measured_support(net, eps)
        r = max(declared, measured, eps * 1e-6)
        integral, int_err = quad(lambda u: float(net.eval(eps, u)), -r, r,
                                 epsabs=1e-12, limit=400)
        l1, l1_err = quad(lambda u: abs(float(net.eval(eps, u))), -r, r,
                          epsabs=1e-12, limit=400)
        slack = 1e-9 * max(1.0, eps)
        checks.append(NetCheck(
            eps=eps, support_declared=declared, support_measured=measured,
            integral=integral, integral_err=int_err, l1=l1, l1_err=l1_err,
            support_ok=(declared <= eps + slack and measured <= eps + slack),
            indeterminate=(int_err > 1e-9 or l1_err > 1e-9),
        ))

    deviations = [abs(c.integral - 1.0) for c in checks]
    trend_ok = all(b <= a + tol for a, b in zip(deviations, deviations[1:]))
    k_measured = max(c.l1 for c in checks)
    return NetVerificationReport(
        checks=checks,
        k_declared=net.l1_bound,
        k_measured=k_measured,
        supports_ok=all(c.support_ok for c in checks),
        integral_ok=(deviations[-1] <= tol and trend_ok),
        l1_ok=(k_measured <= net.l1_bound + tol),
        indeterminate=any(c.indeterminate for c in checks),
        tol=tol,
    )


@dataclass
class GrowthSample:
    direction: int
    radius: float
    distance: float
    value: float
    distance_is_lower_bound: bool


@dataclass
class GrowthReport:
    exponent: float
    stderr: float
    r1: float
    r2: float
    classification: str
    margin: float
    samples: list = field(default_factory=list)
    dropped_directions: list = field(default_factory=list)
    fit_count: int = 0


def classify_growth(profile, model, xbar, ray_directions, radii, *,
                    margin=0.1, rtol=1e-9, atol=1e-9):
    """Classify the radial growth of a profile around a base point.

    Samples ``f`` along unit-speed radial geodesics from ``xbar`` at the
    given arc-length radii, then fits ``log |f|`` against
    ``log d(x, xbar)`` by least squares on the largest half of the radii.
    The estimated exponent classifies the profile as ``subquadratic``
    (below ``2 - margin``), ``superquadratic`` (above ``2 + margin``) or
    ``at-most-quadratic`` in between.

    Directions whose radial geodesic fails to integrate are dropped and
    reported; if every direction fails, a :class:`NumericalError` is
    raised.
    """
    xbar = np.asarray(xbar, dtype=float)
    model.require_inside(xbar)
    radii = [float(r) for r in radii]
    if len(radii) < 2 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing with at least two values")
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")

    samples = []
    dropped = []
    for idx, direction in enumerate(ray_directions):
        w = np.asarray(direction, dtype=float)
        speed = model.norm_at(xbar, w)
        if speed == 0.0:
            raise ValueError("ray directions must be nonzero")
        w = w / speed
        try:
            ray = dynamics.background_path(model, xbar, w, 0.0, radii[-1],
                                           rtol=rtol, atol=atol)
        except IntegrationFailure:
            dropped.append(idx)
            continue
        for r in radii:
            x = ray.x_at(r)
            d = geometry.distance_estimate(model, xbar, x)
            samples.append(GrowthSample(idx, r, d.value,
                                        profile.f(x), d.lower_bound))
    if not samples:
        raise NumericalError("all ray directions failed to integrate")

    cut = radii[len(radii) // 2]
    fit = [s for s in samples
           if s.radius >= cut and s.distance > 0.0 and abs(s.value) > 1e-300]
    if len(fit) >= 2:
        lx = np.log([s.distance for s in fit])
        ly = np.log([abs(s.value) for s in fit])
        (slope, intercept), res = np.polyfit(lx, ly, 1), None
        pred = slope * lx + intercept
        dof = len(fit) - 2
        sxx = float(np.sum((lx - lx.mean()) ** 2))
        if dof > 0 and sxx > 0:
            s2 = float(np.sum((ly - pred) ** 2)) / dof
            stderr = math.sqrt(s2 / sxx)
        else:
            stderr = 0.0
        r1 = math.exp(intercept)
    else:
        # no usable growth signal (constant-zero or single point)
        slope, stderr, r1 = 0.0, 0.0, 0.0
    r2 = max(0.0, max((s.value - r1 * s.distance ** slope
                       for s in samples if s.distance > 0.0), default=0.0))

    if slope < 2.0 - margin:
        label = "subquadratic"
    elif slope > 2.0 + margin:
        label = "superquadratic"
    else:
        label = "at-most-quadratic"
    return GrowthReport(exponent=float(slope), stderr=float(stderr),
                        r1=float(r1), r2=float(r2), classification=label,
                        margin=margin, samples=samples,
                        dropped_directions=dropped, fit_count=len(fit))
