"""Fixed-point existence machinery for the shock-crossing initial value
problem.

The strip IVP ``xddot = F1(x, xdot) + F2(x) delta_eps`` with data at
``u = -eps`` is governed by two fields built from the geometry and the
profile::

    F1(y, z)^k = -Gamma^k_ij(y) z^i z^j
    F2(y)^k    = 1/2 h^{km}(y) d_m f(y)

Given sup norms of these fields over coordinate balls

    I1 = {|x - x0| <= b},   I2 = {|z - xdot0| <= c + K ||F2||},

the contraction scale is

    alpha = min(1, b / (|xdot0| + ||F1|| + K ||F2||), c / ||F1||)

with the convention ``c / 0 = +inf``, and the IVP has a unique solution on
``[-eps, alpha - eps]`` staying inside ``I1 x I2``.  Choosing
``eps0 = alpha / 2`` guarantees the solution crosses the strip whenever
``eps <= eps0``.

Sup norms and Lipschitz constants are estimated by sampling over the balls
enlarged by a safety factor; this is a declared heuristic, not proof-grade
interval arithmetic, and the certificate records the grid used.  The
iteration itself is carried out by :func:`picard_solve` on a uniform grid
with composite Simpson quadrature; it is contractive in the iterated sense
only, with n-step constants

    a_n = 4 max(Lip(F1, I3), K Lip(F2, I1)) alpha^(2n-2) / (2n-2)!

whose summability drives convergence (:func:`weissinger_coefficient`).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import CertificateViolation, ChartDomainError, NumericalError
from .profiles import metric_gradient

__all__ = [
    "SupNormEstimate", "ExistenceCertificate", "estimate_sup_norms",
    "alpha_bound", "certify", "PicardResult", "picard_solve",
    "weissinger_coefficient", "weissinger_budget",
]

_FD_STEP = float(np.finfo(float).eps) ** (1.0 / 3.0)


@dataclass
class SupNormEstimate:
    norm_F1: float
    norm_F2: float
    lip_F1: float
    lip_F2: float
    i2_radius: float
    grid: int
    safety: float


@dataclass
class ExistenceCertificate:
    """Crossing certificate anchored at the strip-entry data."""

    x0: np.ndarray
    xdot0: np.ndarray
    b: float
    c: float
    k: float
    norm_F1: float
    norm_F2: float
    lip_F1: float
    lip_F2: float
    i2_radius: float
    alpha: float
    eps0: float
    chart: str
    grid: int
    safety: float

    def contains_x(self, x, slack=1e-9):
        return float(np.linalg.norm(np.asarray(x) - self.x0)) <= self.b + slack

    def contains_xdot(self, z, slack=1e-9):
        return (float(np.linalg.norm(np.asarray(z) - self.xdot0))
                <= self.i2_radius + slack)


def _ball_grid(center, radius, per_axis):
    axes = [np.linspace(c - radius, c + radius, per_axis) for c in center]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    pts = mesh.reshape(-1, len(center))
    keep = np.linalg.norm(pts - center, axis=1) <= radius * (1.0 + 1e-12)
    return pts[keep]


def _f2_at(model, profile, p):
    return 0.5 * metric_gradient(profile, model, p)


def estimate_sup_norms(model, profile, x0, xdot0, b, c_seed, *, k=1.0,
                       grid=9, safety=1.1):
    """Sample-based sup norms and Lipschitz constants of F1 and F2.

    The safety factor enlarges the sampled balls rather than scaling the
    sampled maxima: values of constant fields stay exact while growing
    fields are overestimated conservatively.  Points of the enlarged ball
    falling outside the chart are skipped, but the nominal ball ``I1`` must
    be admissible.  ``I2`` is rebuilt from the computed ``||F2||``, which
    depends on ``I1`` only, so one pass resolves its self-reference.
    """
    if grid < 9:
        raise ValueError("grid must be at least 9 points per axis")
    x0 = np.asarray(x0, dtype=float)
    xdot0 = np.asarray(xdot0, dtype=float)
    model.require_inside(x0)

    nominal = _ball_grid(x0, b, grid)
    for p in nominal:
        if not model.contains(p):
            raise ChartDomainError(
                "ball I1 leaves the chart domain; shrink b")
    padded = _ball_grid(x0, safety * b, grid)
    pts = np.array([p for p in padded if model.contains(p)])

    n = model.dim
    m = len(pts)
    f2 = np.empty((m, n))
    for i, p in enumerate(pts):
        f2[i] = _f2_at(model, profile, p)
    norm_f2 = float(np.max(np.linalg.norm(f2, axis=1)))

    # Lipschitz of F2 over I1: largest sampled Jacobian (Frobenius bound)
    lip_f2 = 0.0
    for p in pts:
        jac = np.zeros((n, n))
        for axis in range(n):
            step = _FD_STEP * max(1.0, abs(p[axis]))
            pp = p.copy()
            pp[axis] += step
            pm = p.copy()
            pm[axis] -= step
            if not (model.contains(pp) and model.contains(pm)):
                continue
            jac[:, axis] = (_f2_at(model, profile, pp)
                            - _f2_at(model, profile, pm)) / (2.0 * step)
        lip_f2 = max(lip_f2, float(np.linalg.norm(jac)))

    i2_radius = c_seed + k * norm_f2
    zs = _ball_grid(xdot0, safety * i2_radius, grid)

    gammas = np.empty((m, n, n, n))
    for i, p in enumerate(pts):
        gammas[i] = model.christoffel_at(p)
    # F1[y, z]^k = -Gamma^k_ij(y) z^i z^j over the product grid
    f1 = -np.einsum("mkij,pi,pj->mpk", gammas, zs, zs)
    norm_f1 = float(np.max(np.linalg.norm(f1, axis=2)))

    # joint Lipschitz of F1 on I3: d/dz analytic, d/dy by differencing Gamma
    jz = -2.0 * np.einsum("mklj,pj->mpkl", gammas, zs)
    jy = np.empty((m, len(zs), n, n))
    for axis in range(n):
        dgam = np.empty_like(gammas)
        for i, p in enumerate(pts):
            step = _FD_STEP * max(1.0, abs(p[axis]))
            pp = p.copy()
            pp[axis] += step
            pm = p.copy()
            pm[axis] -= step
            if model.contains(pp) and model.contains(pm):
                dgam[i] = (model.christoffel_at(pp)
                           - model.christoffel_at(pm)) / (2.0 * step)
            else:
                dgam[i] = 0.0
        jy[..., axis] = -np.einsum("mkij,pi,pj->mpk", dgam, zs, zs)
    jfull = np.concatenate([jy, jz], axis=3)
    lip_f1 = float(np.max(np.sqrt(np.sum(jfull * jfull, axis=(2, 3)))))

    return SupNormEstimate(norm_F1=norm_f1, norm_F2=norm_f2, lip_F1=lip_f1,
                           lip_F2=lip_f2, i2_radius=i2_radius, grid=grid,
                           safety=safety)


def alpha_bound(speed, b, c, norm_F1, norm_F2, k):
    """Contraction scale alpha and strip half-width budget eps0 = alpha/2.

    Degenerate ratios follow the convention ``x / 0 = +inf``: with a flat
    chart, a constant-gradient profile and resting data every ratio is
    infinite and alpha = 1.
    """
    if b <= 0 or c <= 0 or k <= 0:
        raise ValueError("b, c and K must be positive")
    if min(speed, norm_F1, norm_F2) < 0:
        raise ValueError("norms must be nonnegative")
    denom = speed + norm_F1 + k * norm_F2
    ratio_b = b / denom if denom > 0 else math.inf
    ratio_c = c / norm_F1 if norm_F1 > 0 else math.inf
    alpha = min(1.0, ratio_b, ratio_c)
    return alpha, alpha / 2.0


def certify(model, profile, x0, xdot0, *, b=1.0, c=1.0, k=1.0, grid=9,
            safety=1.1):
    """Build an :class:`ExistenceCertificate` anchored at ``(x0, xdot0)``.

    The anchor is the strip-entry data of the IVP; ``k`` is the L1 bound of
    the impulse family in use.
    """
    x0 = np.asarray(x0, dtype=float)
    xdot0 = np.asarray(xdot0, dtype=float)
    est = estimate_sup_norms(model, profile, x0, xdot0, b, c, k=k, grid=grid,
                             safety=safety)
    speed = float(np.linalg.norm(xdot0))
    alpha, eps0 = alpha_bound(speed, b, c, est.norm_F1, est.norm_F2, k)
    return ExistenceCertificate(
        x0=x0.copy(), xdot0=xdot0.copy(), b=float(b), c=float(c), k=float(k),
        norm_F1=est.norm_F1, norm_F2=est.norm_F2, lip_F1=est.lip_F1,
        lip_F2=est.lip_F2, i2_radius=est.i2_radius, alpha=alpha, eps0=eps0,
        chart=model.name, grid=grid, safety=safety)


@dataclass
class PicardResult:
    t: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    iterations: int
    corrective_iterations: int
    converged: bool
    shifts: list
    grid_size: int
    refinements: int
    grid_converged: bool

    def x_at_nodes(self):
        return self.t, self.x


def _picard_on_grid(model, profile, net, eps, t, x0, xdot0, tol, max_iter,
                    certificate):
    m = len(t)
    n = len(x0)
    delta = np.asarray(net.eval(eps, t), dtype=float)
    active = np.nonzero(delta != 0.0)[0]
    x = x0 + np.outer(t + eps, xdot0)
    xd = np.tile(xdot0, (m, 1))
    shifts = []
    converged = False
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        integrand = np.empty((m, n))
        for i in range(m):
            gamma = model.christoffel_at(x[i])
            integrand[i] = -np.einsum("kij,i,j->k", gamma, xd[i], xd[i])
        for i in active:
            grad = model.inverse_metric_at(x[i]) @ profile.df(x[i])
            integrand[i] += (0.5 * delta[i]) * grad
        xd_new = xdot0 + cumulative_simpson(integrand, x=t, axis=0, initial=0.0)
        x_new = x0 + cumulative_simpson(xd_new, x=t, axis=0, initial=0.0)
        shift = (float(np.max(np.abs(x_new - x)))
                 + float(np.max(np.abs(xd_new - xd))))
        shifts.append(shift)
        x, xd = x_new, xd_new
        if certificate is not None:
            if not all(certificate.contains_x(x[i]) for i in range(0, m, max(1, m // 64))):
                raise CertificateViolation(
                    "iterate left the ball I1; b was chosen too small")
            if not all(certificate.contains_xdot(xd[i]) for i in range(0, m, max(1, m // 64))):
                raise CertificateViolation(
                    "iterate velocity left I2; c was chosen too small")
        if shift <= tol:
            converged = True
            break
    return x, xd, shifts, converged, iterations


def picard_solve(model, profile, net, eps, x0, xdot0, alpha, *, tol=1e-10,
                 max_iter=60, base_grid=2001, max_refinements=3,
                 certificate=None):
    """Solve the strip IVP by fixed-point iteration on a uniform grid.

    Iterates the integral operator

        A(x)(t) = x0 + xdot0 (t + eps)
                  + double-integral of [F1(x, xdot) + F2(x) delta_eps]

    from the straight-line seed on ``J = [-eps, alpha - eps]``, evaluating
    the nested integrals by cumulative composite Simpson quadrature.  The
    iteration stops when the discrete C1 norm of the update falls below
    ``tol``.  The grid is then doubled until the fixed point itself shifts
    by at most ``tol`` between grids.

    Requires ``eps <= alpha / 2`` so the interval reaches ``u = eps``.
    When a certificate is supplied, iterates leaving its containment region
    raise :class:`CertificateViolation`.
    """
    if eps > alpha / 2.0 + 1e-12:
        raise ValueError("eps must be at most alpha/2")
    x0 = np.asarray(x0, dtype=float)
    xdot0 = np.asarray(xdot0, dtype=float)
    model.require_inside(x0)

    nodes = int(base_grid)
    if nodes % 2 == 0:
        nodes += 1
    nodes = max(nodes, 2001)

    prev = None
    refinements = 0
    grid_converged = False
    while True:
        t = np.linspace(-eps, alpha - eps, nodes)
        x, xd, shifts, converged, iters = _picard_on_grid(
            model, profile, net, eps, t, x0, xdot0, tol, max_iter, certificate)
        if not converged:
            raise NumericalError(
                f"fixed-point iteration did not converge within {max_iter} "
                f"iterations (last shift {shifts[-1]:.3e})")
        if prev is not None:
            coarse_x, coarse_xd = prev
            shift = (float(np.max(np.abs(x[::2] - coarse_x)))
                     + float(np.max(np.abs(xd[::2] - coarse_xd))))
            if shift <= tol:
                grid_converged = True
                break
        if refinements >= max_refinements:
            break
        prev = (x, xd)
        nodes = 2 * nodes - 1
        refinements += 1

    corrective = sum(1 for s in shifts if s > tol)
    return PicardResult(t=t, x=x, xdot=xd, iterations=iters,
                        corrective_iterations=corrective,
                        converged=converged, shifts=shifts, grid_size=nodes,
                        refinements=refinements, grid_converged=grid_converged)


def weissinger_coefficient(n, alpha, lip_F1, lip_F2, k):
    """The n-step contraction constant a_n of the iterated operator."""
    if n < 2:
        raise ValueError("n must be at least 2")
    lead = 4.0 * max(lip_F1, k * lip_F2)
    return lead * alpha ** (2 * n - 2) / math.factorial(2 * n - 2)


def weissinger_budget(alpha, lip_F1, lip_F2, k, n_max=60):
    """Partial sums of the contraction series, the iteration budget."""
    terms = np.array([weissinger_coefficient(n, alpha, lip_F1, lip_F2, k)
                      for n in range(2, n_max + 1)])
    return np.cumsum(terms)
