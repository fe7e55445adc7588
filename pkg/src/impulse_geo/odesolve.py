"""Adaptive embedded Runge-Kutta integration with dense output.

A single Dormand-Prince 5(4) pair drives every trajectory in this package.
The fifth-order solution is propagated, the embedded fourth-order solution
provides the local error estimate, and each accepted step stores the
pair's quartic dense-output polynomial (built from the already computed
stages, so it costs no extra evaluations).  A plain cubic Hermite
interpolant was tried first and could not hold the 1e-8 dense-measurement
budget at the step sizes the controller selects.

Two guards reflect how chart-based geometry fails in practice:

* a right-hand side may raise :class:`~impulse_geo.errors.ChartDomainError`
  (or produce non-finite values) at a trial stage; the step is then retried
  with a smaller size and, if the step size collapses, integration aborts
  carrying the last accepted state;
* an accepted state whose magnitude exceeds the blow-up bound aborts
  immediately.
"""

import math

import numpy as np

from .errors import ChartDomainError, IntegrationFailure

__all__ = ["DensePath", "solve_rk45"]

# Dormand-Prince 5(4) tableau.  The last row of _A is the propagating weight
# vector, so the seventh (FSAL) stage is the first stage of the next step.
_C = (0.2, 0.3, 0.8, 8.0 / 9.0, 1.0)
_A = (
    (0.2,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
_ERR = (71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
        -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

# quartic dense-output weights of the pair: y(t + s h) =
# y + h * (K^T P) . (s, s^2, s^3, s^4) with K the 7 stage slopes
_P = np.array([
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0,
     69997945.0 / 29380423.0],
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_MAX_STEPS = 1_000_000


class _StageFailure(Exception):
    """Internal: a trial stage could not be evaluated."""


class DensePath:
    """Piecewise quartic interpolant built on accepted RK steps.

    Stores the accepted nodes and states plus one polynomial coefficient
    block per step; evaluation at a query point uses the polynomial of the
    enclosing step.
    """

    def __init__(self, ts, ys, coeffs):
        self.ts = np.asarray(ts, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.coeffs = np.asarray(coeffs, dtype=float)  # (steps, dim, 4)
        if len(self.ts) < 2:
            raise ValueError("a dense path needs at least one accepted step")

    @property
    def t0(self):
        return float(self.ts[0])

    @property
    def t1(self):
        return float(self.ts[-1])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t)
        idx = np.clip(np.searchsorted(self.ts, tq, side="right") - 1,
                      0, len(self.ts) - 2)
        ta = self.ts[idx]
        h = self.ts[idx + 1] - ta
        s = (tq - ta) / h
        powers = np.stack([s, s * s, s ** 3, s ** 4], axis=-1)  # (q, 4)
        q = self.coeffs[idx]  # (q, dim, 4)
        out = self.ys[idx] + h[:, None] * np.einsum("qdj,qj->qd", q, powers)
        return out[0] if scalar else out


def _checked(fun, t, y):
    try:
        f = np.asarray(fun(t, y), dtype=float)
    except ChartDomainError as exc:
        raise _StageFailure from exc
    if not np.all(np.isfinite(f)):
        raise _StageFailure
    return f


def _rms(v):
    return float(np.sqrt(np.mean(v * v)))


def _initial_step(fun, t0, y0, f0, t_end, rtol, atol, max_step):
    scale = atol + np.abs(y0) * rtol
    d0 = _rms(y0 / scale)
    d1 = _rms(f0 / scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, t_end - t0, max_step)
    try:
        f1 = _checked(fun, t0 + h0, y0 + h0 * f0)
        d2 = _rms((f1 - f0) / scale) / h0
    except _StageFailure:
        return max(h0 * 1e-3, 1e-12)
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, t_end - t0, max_step)


def solve_rk45(fun, t0, t1, y0, *, rtol=1e-10, atol=1e-10, max_step=math.inf,
               first_step=None, blowup=1e8, phase=None):
    """Integrate ``y' = fun(t, y)`` forward from ``t0`` to ``t1``.

    Returns ``(path, stats)`` where ``path`` is a :class:`DensePath` over
    ``[t0, t1]`` and ``stats`` is a dict with step counts.  Raises
    :class:`IntegrationFailure` on blow-up, chart escape or step collapse;
    the exception carries the last accepted state and the partial path.
    """
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    y = np.asarray(y0, dtype=float).copy()
    t = float(t0)
    try:
        f = _checked(fun, t, y)
    except _StageFailure:
        raise IntegrationFailure(
            "chart_escape", t, y, phase,
            "right-hand side undefined at the initial state") from None

    ts, ys, coeffs = [t], [y.copy()], []
    n_accepted = 0
    n_rejected = 0
    n_rhs = 1
    span = t1 - t0
    h = first_step if first_step is not None else _initial_step(
        fun, t0, y, f, t1, rtol, atol, max_step)
    h = min(max(h, 1e-12), max_step, span)
    stage_failed = False

    def _fail(reason, u, state, msg=None):
        partial = DensePath(ts, ys, coeffs) if len(ts) >= 2 else None
        raise IntegrationFailure(reason, u, state, phase, msg, partial=partial)

    while t1 - t > 1e-14 * max(1.0, abs(t0), abs(t1)):
        if n_accepted + n_rejected >= _MAX_STEPS:
            _fail("step_limit", t, y)
        h = min(h, max_step, t1 - t)
        if h < 1e-14 * max(1.0, abs(t)):
            _fail("chart_escape" if stage_failed else "step_underflow", t, y)
        try:
            k = [f]
            for ci, ai in zip(_C, _A[:-1]):
                yi = y + h * sum(a * kk for a, kk in zip(ai, k))
                k.append(_checked(fun, t + ci * h, yi))
            y_new = y + h * sum(a * kk for a, kk in zip(_A[-1], k))
            t_new = t + h
            if t1 - t_new < 1e-12 * max(1.0, abs(t1)):
                t_new = t1
            f_new = _checked(fun, t_new, y_new)
        except _StageFailure:
            stage_failed = True
            n_rejected += 1
            h *= 0.5
            continue
        n_rhs += 7
        k.append(f_new)
        err = h * sum(e * kk for e, kk in zip(_ERR, k))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = _rms(err / scale)
        if err_norm <= 1.0:
            if np.max(np.abs(y_new)) > blowup:
                _fail("blow_up", t_new, y_new,
                      f"state magnitude exceeded {blowup:g}")
            coeffs.append(np.einsum("sd,sj->dj", np.asarray(k), _P))
            t, y, f = t_new, y_new, f_new
            ts.append(t)
            ys.append(y.copy())
            n_accepted += 1
            stage_failed = False
            factor = _MAX_FACTOR if err_norm == 0.0 else min(
                _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2))
            h *= factor
        else:
            n_rejected += 1
            h *= min(1.0, max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2))

    stats = {"n_steps": n_accepted, "n_rejected": n_rejected, "n_rhs": n_rhs}
    return DensePath(ts, ys, coeffs), stats
