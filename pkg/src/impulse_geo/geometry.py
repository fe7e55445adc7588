"""Chart-based Riemannian manifolds (N, h).

A :class:`ManifoldModel` is a single chart: a metric callback on chart
coordinates, optional analytic inverse metric and Christoffel symbols
(finite differences of the metric otherwise), a chart-domain predicate, and
a declared completeness flag.  Chart transitions are out of scope; a
geodesic leaving the chart domain is an integration failure, never a silent
extrapolation.

Built-in models
---------------
``euclidean(n)``
    Flat space, identity metric, vanishing Christoffel symbols.
``hyperbolic_half_plane()``
    The upper half-plane ``x2 > 0`` with metric ``diag(1, 1) / x2**2``
    (constant curvature -1); the single chart covers the whole manifold.
``sphere_stereographic()``
    The round unit sphere in the stereographic chart with metric
    ``4 / (1 + |x|^2)^2 * I``.  The chart misses one point; trajectories
    running into it blow up in chart coordinates and are caught by the
    integration guard.
"""

import math
from typing import NamedTuple

import numpy as np

from . import dynamics
from .errors import ChartDomainError, IntegrationFailure, ShootingFailure

__all__ = [
    "ManifoldModel", "euclidean", "hyperbolic_half_plane",
    "sphere_stereographic", "from_metric", "background_geodesic",
    "DistanceEstimate", "distance_estimate",
]

# optimal central-difference step for first derivatives, scaled by magnitude
_FD_STEP = float(np.finfo(float).eps) ** (1.0 / 3.0)


class ManifoldModel:
    """A Riemannian manifold presented in a single coordinate chart."""

    def __init__(self, dim, metric, *, inverse_metric=None, christoffel=None,
                 chart_domain=None, complete=False, name="user",
                 exact_distance=None):
        self.dim = int(dim)
        self.name = name
        self.completeness_declared = bool(complete)
        self._metric = metric
        self._inverse_metric = inverse_metric
        self._christoffel = christoffel
        self._chart_domain = chart_domain
        self._exact_distance = exact_distance

    def __repr__(self):
        return f"ManifoldModel({self.name!r}, dim={self.dim})"

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            return False
        if not np.all(np.isfinite(x)):
            return False
        return True if self._chart_domain is None else bool(self._chart_domain(x))

    def require_inside(self, x):
        if not self.contains(x):
            raise ChartDomainError(
                f"point {np.asarray(x)} outside chart domain of {self.name}")

    def metric_at(self, x):
        x = np.asarray(x, dtype=float)
        self.require_inside(x)
        return np.asarray(self._metric(x), dtype=float)

    def inverse_metric_at(self, x):
        x = np.asarray(x, dtype=float)
        self.require_inside(x)
        if self._inverse_metric is not None:
            return np.asarray(self._inverse_metric(x), dtype=float)
        return np.linalg.inv(np.asarray(self._metric(x), dtype=float))

    def christoffel_at(self, x):
        """Christoffel symbols ``Gamma[k, i, j]`` at ``x``.

        Computed from the metric by central finite differences when no
        analytic callback was supplied.
        """
        x = np.asarray(x, dtype=float)
        self.require_inside(x)
        if self._christoffel is not None:
            return np.asarray(self._christoffel(x), dtype=float)
        return self._fd_christoffel(x)

    def _fd_christoffel(self, x):
        n = self.dim
        dh = np.empty((n, n, n))  # dh[l, i, j] = d_l h_ij
        for axis in range(n):
            step = _FD_STEP * max(1.0, abs(x[axis]))
            xp = x.copy()
            xp[axis] += step
            xm = x.copy()
            xm[axis] -= step
            dh[axis] = (self.metric_at(xp) - self.metric_at(xm)) / (2.0 * step)
        hinv = self.inverse_metric_at(x)
        # T[i, j, l] = d_i h_jl + d_j h_il - d_l h_ij
        t = dh + dh.transpose(1, 0, 2) - dh.transpose(1, 2, 0)
        return 0.5 * np.einsum("kl,ijl->kij", hinv, t)

    def norm_at(self, x, w):
        """Riemannian norm ``sqrt(h(w, w))`` of a tangent vector at ``x``."""
        h = self.metric_at(x)
        return math.sqrt(max(0.0, float(w @ h @ w)))


def euclidean(n):
    eye = np.eye(n)
    zero = np.zeros((n, n, n))
    return ManifoldModel(
        n,
        lambda x: eye.copy(),
        inverse_metric=lambda x: eye.copy(),
        christoffel=lambda x: zero.copy(),
        complete=True,
        name=f"euclidean({n})",
        exact_distance=lambda a, b: float(np.linalg.norm(np.subtract(a, b))),
    )


def hyperbolic_half_plane():
    def metric(x):
        return np.diag([1.0, 1.0]) / x[1] ** 2

    def inverse(x):
        return np.diag([x[1] ** 2, x[1] ** 2])

    def christoffel(x):
        inv_y = 1.0 / x[1]
        g = np.zeros((2, 2, 2))
        g[0, 0, 1] = g[0, 1, 0] = -inv_y
        g[1, 0, 0] = inv_y
        g[1, 1, 1] = -inv_y
        return g

    def dist(a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        arg = 1.0 + float((a - b) @ (a - b)) / (2.0 * a[1] * b[1])
        return math.acosh(max(1.0, arg))

    return ManifoldModel(
        2, metric, inverse_metric=inverse, christoffel=christoffel,
        chart_domain=lambda x: x[1] > 0.0, complete=True,
        name="hyperbolic_half_plane", exact_distance=dist,
    )


def _sphere_embed(x):
    r2 = float(x @ x)
    return np.array([2.0 * x[0], 2.0 * x[1], r2 - 1.0]) / (1.0 + r2)


def sphere_stereographic():
    def metric(x):
        c = 2.0 / (1.0 + float(x @ x))
        return (c * c) * np.eye(2)

    def inverse(x):
        c = 2.0 / (1.0 + float(x @ x))
        return np.eye(2) / (c * c)

    def christoffel(x):
        # conformal metric exp(2 phi) I with phi = log 2 - log(1 + |x|^2):
        # Gamma^k_ij = delta^k_i w_j + delta^k_j w_i - delta_ij w_k
        w = -2.0 * x / (1.0 + float(x @ x))
        g = np.zeros((2, 2, 2))
        for k in range(2):
            for i in range(2):
                g[k, i, k] += w[i]
                g[k, k, i] += w[i]
                g[k, i, i] -= w[k]
        return g

    def dist(a, b):
        pa = _sphere_embed(np.asarray(a, dtype=float))
        pb = _sphere_embed(np.asarray(b, dtype=float))
        return math.acos(min(1.0, max(-1.0, float(pa @ pb))))

    return ManifoldModel(
        2, metric, inverse_metric=inverse, christoffel=christoffel,
        complete=True, name="sphere_stereographic", exact_distance=dist,
    )


def from_metric(dim, metric, *, chart_domain=None, inverse_metric=None,
                complete=False, name="user"):
    """Wrap a user metric callback; Christoffel symbols fall back to
    central finite differences of the metric."""
    return ManifoldModel(dim, metric, inverse_metric=inverse_metric,
                         chart_domain=chart_domain, complete=complete,
                         name=name)


def background_geodesic(model, x0, xdot0, u_start, u_end, *, rtol=1e-10,
                        atol=1e-10, blowup=1e8):
    """Solve the background geodesic equation ``xddot = -Gamma(xdot, xdot)``.

    Data is posed at ``u_start``.  The returned path conserves the
    Riemannian speed ``h(xdot, xdot)`` up to the integrator tolerance.
    """
    return dynamics.background_path(model, x0, xdot0, u_start, u_end,
                                    rtol=rtol, atol=atol, blowup=blowup)


class DistanceEstimate(NamedTuple):
    value: float
    method: str  # "closed_form" | "shooting" | "chord_lower_bound"
    lower_bound: bool


def _shooting_endpoint(model, x, w):
    path = dynamics.background_path(model, x, w, 0.0, 1.0,
                                    rtol=1e-10, atol=1e-10)
    return path.x_at(1.0)


def _shooting_distance(model, x, xbar, tol=1e-9, max_iter=40):
    # Newton iteration on the initial velocity of a unit-time geodesic;
    # the geodesic has constant speed, so its length is sqrt(h(w, w)).
    w = xbar - x
    scale = 1.0 + float(np.linalg.norm(xbar))
    for _ in range(max_iter):
        end = _shooting_endpoint(model, x, w)
        miss = end - xbar
        if float(np.linalg.norm(miss)) <= tol * scale:
            return model.norm_at(x, w)
        n = model.dim
        jac = np.empty((n, n))
        for j in range(n):
            dw = 1e-6 * max(1.0, abs(w[j]))
            wp = w.copy()
            wp[j] += dw
            wm = w.copy()
            wm[j] -= dw
            jac[:, j] = (_shooting_endpoint(model, x, wp)
                         - _shooting_endpoint(model, x, wm)) / (2.0 * dw)
        try:
            w = w - np.linalg.solve(jac, miss)
        except np.linalg.LinAlgError:
            raise ShootingFailure("singular shooting Jacobian") from None
    raise ShootingFailure("shooting did not converge")


def distance_estimate(model, x, xbar):
    """Estimate the Riemannian distance ``d(x, xbar)``.

    Exact for models declaring a closed form; a geodesic shooting estimate
    otherwise.  When shooting fails the chord lower bound
    ``|x - xbar| * sqrt(min eigenvalue of h along the chord)`` is returned
    with ``lower_bound=True``.  The estimate feeds the growth classifier
    only, never the integrator.
    """
    x = np.asarray(x, dtype=float)
    xbar = np.asarray(xbar, dtype=float)
    model.require_inside(x)
    model.require_inside(xbar)
    if np.array_equal(x, xbar):
        return DistanceEstimate(0.0, "closed_form", False)
    if model._exact_distance is not None:
        return DistanceEstimate(float(model._exact_distance(x, xbar)),
                                "closed_form", False)
    try:
        return DistanceEstimate(_shooting_distance(model, x, xbar),
                                "shooting", False)
    except (ShootingFailure, IntegrationFailure):
        lam = math.inf
        for t in np.linspace(0.0, 1.0, 33):
            p = x + t * (xbar - x)
            if model.contains(p):
                lam = min(lam, float(np.min(np.linalg.eigvalsh(model.metric_at(p)))))
        if not math.isfinite(lam) or lam <= 0.0:
            lam = 0.0
        value = float(np.linalg.norm(xbar - x)) * math.sqrt(lam)
        return DistanceEstimate(value, "chord_lower_bound", True)
