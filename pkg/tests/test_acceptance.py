"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -rA`` to see the per-criterion
lines.  Criterion 2 is split: 2a checks convergence of the v component to
the energy-consistent broken-geodesic value; 2b keeps the historically
quoted target that omits the factor 1/2 in the kink coefficient and is
marked as a strict expected failure, so the suite would go red if the
library ever started reproducing the unphysical value.
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from impulse_geo import (dynamics, existence, geometry, limits, profiles,
                         scenarios)
from impulse_geo.dynamics import InitialData, integrate_impulsive_geodesic
from impulse_geo.errors import IntegrationFailure

EU = geometry.euclidean(2)
NET = profiles.mollifier_net()
LINEAR = profiles.linear_profile([1.0, 0.0])
DATA_FLAT = InitialData([0.0, 0.0], [1.0, 0.0])


def report(tag, ok, detail):
    print(f"[criterion {tag}] {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def test_criterion_1_flat_linear_closed_form():
    t0 = time.time()
    eps = 1e-2
    path = integrate_impulsive_geodesic(EU, LINEAR, NET, eps, DATA_FLAT, 1.0)
    gain_err = abs(path.xdot_at(eps)[0] - 1.5)

    def oracle_x1(u):
        if u <= -eps:
            return u + 1.0
        val, _ = quad(lambda r: (u - r) * float(NET.eval(eps, r)),
                      -eps, min(u, eps), epsabs=1e-13, limit=400)
        return u + 1.0 + 0.5 * val

    us = np.linspace(-1.0, 1.0, 201)
    sup = max(abs(path.x_at(float(u))[0] - oracle_x1(float(u))) for u in us)
    elapsed = time.time() - t0
    ok = gain_err <= 1e-8 and sup <= 1e-8 and elapsed < 1.0
    assert report("1", ok,
                  f"xdot gain err {gain_err:.2e}, path sup err {sup:.2e}, "
                  f"{elapsed:.2f}s")


def _v_sweep():
    values = []
    schedule = [2.0 ** -k for k in range(3, 11)]
    for eps in schedule:
        path = integrate_impulsive_geodesic(EU, LINEAR, NET, eps, DATA_FLAT,
                                            1.0)
        values.append(float(path.v_at(1.0)))
    return schedule, values


def test_criterion_2a_v_limit_energy_consistent():
    t0 = time.time()
    target = -1.125  # jump -1/2 plus kink -5/8 at u = 1
    schedule, values = _v_sweep()
    errs = [abs(v - target) for v in values]
    decreasing = all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    elapsed = time.time() - t0
    ok = decreasing and errs[-1] <= 1e-4 and elapsed < 10.0
    assert report("2a", ok,
                  f"v_eps(1) -> {values[-1]:.6f}, target {target}, final err "
                  f"{errs[-1]:.2e}, decreasing={decreasing}, {elapsed:.1f}s")


@pytest.mark.xfail(
    strict=True,
    reason="the -1.75 target omits the factor 1/2 in the kink coefficient; "
           "it is incompatible with conservation of g(gamma',gamma') across "
           "the impulse, and the measured sweep moves away from it "
           "(towards -1.125).  Strict xfail guards against the library ever "
           "reproducing the unphysical value.")
def test_criterion_2b_v_limit_uncorrected_target():
    target = -1.75
    schedule, values = _v_sweep()
    errs = [abs(v - target) for v in values]
    decreasing = all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    report("2b", decreasing and errs[-1] <= 1e-4,
           f"v_eps(1) -> {values[-1]:.6f} vs quoted target {target}: "
           f"final err {errs[-1]:.3f}, decreasing={decreasing}")
    assert decreasing
    assert errs[-1] <= 1e-4


def test_criterion_3_inner_scale_order():
    t0 = time.time()
    schedule = [2.0 ** -k for k in range(3, 9)]
    log_eps = np.log(schedule)
    nets = scenarios.builtin_nets()
    slopes = {}
    for scen in scenarios.builtin_scenarios():
        for net_name in ("mollifier", "signed"):
            errs = [limits.inner_scale_error(scen.model, scen.profile,
                                             nets[net_name], scen.data, eps)
                    for eps in schedule]
            slopes[f"{scen.name}/{net_name}"] = float(
                np.polyfit(log_eps, np.log(errs), 1)[0])
    elapsed = time.time() - t0
    worst = min(slopes.values())
    ok = worst >= 0.9 and elapsed < 120.0
    assert report("3", ok,
                  f"18 combos, min fitted slope {worst:.3f}, {elapsed:.0f}s")


def _consistent_crossing(scen, data, k):
    """Find (eps, entry certificate) with eps <= eps0 of its own anchor."""
    base = dynamics.background_path(scen.model, data.x0, data.xdot0,
                                    -1.0, 0.0, rtol=1e-9, atol=1e-9)
    cert = existence.certify(scen.model, scen.profile, base.x_at(0.0),
                             base.xdot_at(0.0), b=scen.b, c=scen.c, k=k)
    eps = min(0.5, cert.eps0)
    for _ in range(8):
        entry = dynamics.background_path(scen.model, data.x0, data.xdot0,
                                         -1.0, -eps, rtol=1e-9, atol=1e-9)
        ecert = existence.certify(scen.model, scen.profile, entry.x_at(-eps),
                                  entry.xdot_at(-eps), b=scen.b, c=scen.c,
                                  k=k)
        if eps <= ecert.eps0 + 1e-12:
            return eps, ecert
        eps = 0.95 * ecert.eps0
    raise AssertionError("no self-consistent crossing width found")


def test_criterion_4_certificate_soundness():
    t0 = time.time()
    flat = [s for s in scenarios.builtin_scenarios()
            if s.name == "euclidean-linear"][0]
    base = dynamics.background_path(flat.model, flat.data.x0,
                                    flat.data.xdot0, -1.0, 0.0)
    flat_cert = existence.certify(flat.model, flat.profile, base.x_at(0.0),
                                  base.xdot_at(0.0), b=1.0, c=1.0, k=1.0)
    anchor_ok = (abs(flat_cert.alpha - 2.0 / 3.0) < 1e-12
                 and abs(flat_cert.eps0 - 1.0 / 3.0) < 1e-12)

    rng = np.random.default_rng(12345)
    trials = 0
    blowups = 0
    worst_margin = -math.inf
    for scen in scenarios.builtin_scenarios():
        for _ in range(100):
            data = InitialData(scen.data.x0 + rng.uniform(-0.05, 0.05, 2),
                               scen.data.xdot0 + rng.uniform(-0.15, 0.15, 2))
            eps, ecert = _consistent_crossing(scen, data, k=1.0)
            trials += 1
            try:
                path = integrate_impulsive_geodesic(
                    scen.model, scen.profile, NET, eps, data,
                    u_end=max(ecert.alpha - eps, 1.5 * eps))
            except IntegrationFailure:
                blowups += 1
                continue
            us = np.linspace(-eps, min(path.u_end, ecert.alpha - eps), 41)
            dx = float(np.max(np.linalg.norm(path.x_at(us) - ecert.x0,
                                             axis=1)))
            dz = float(np.max(np.linalg.norm(path.xdot_at(us) - ecert.xdot0,
                                             axis=1)))
            worst_margin = max(worst_margin, dx - ecert.b,
                               dz - ecert.i2_radius)
    elapsed = time.time() - t0
    ok = (anchor_ok and trials == 900 and blowups == 0
          and worst_margin <= 1e-9 and elapsed < 120.0)
    assert report("4", ok,
                  f"flat alpha={flat_cert.alpha!r}, {trials} crossings, "
                  f"{blowups} blow-ups, worst containment margin "
                  f"{worst_margin:.2e}, {elapsed:.0f}s")


def test_criterion_5_picard_cross_validation():
    t0 = time.time()
    worst = 0.0
    flat_corrective = None
    for scen in scenarios.builtin_scenarios():
        base = dynamics.background_path(scen.model, scen.data.x0,
                                        scen.data.xdot0, -1.0, 0.0)
        cert = existence.certify(scen.model, scen.profile, base.x_at(0.0),
                                 base.xdot_at(0.0), b=scen.b, c=scen.c,
                                 k=NET.l1_bound)
        eps = cert.eps0 / 2.0
        entry = dynamics.background_path(scen.model, scen.data.x0,
                                         scen.data.xdot0, -1.0, -eps)
        ecert = existence.certify(scen.model, scen.profile, entry.x_at(-eps),
                                  entry.xdot_at(-eps), b=scen.b, c=scen.c,
                                  k=NET.l1_bound)
        alpha = min(cert.alpha, ecert.alpha)
        eps = min(eps, alpha / 2.0)
        res = existence.picard_solve(scen.model, scen.profile, NET, eps,
                                     entry.x_at(-eps), entry.xdot_at(-eps),
                                     alpha, tol=1e-10)
        path = integrate_impulsive_geodesic(scen.model, scen.profile, NET,
                                            eps, scen.data, u_end=alpha)
        sub = np.linspace(0, len(res.t) - 1, 101).astype(int)
        ts = res.t[sub]
        err = max(float(np.max(np.abs(path.x_at(ts) - res.x[sub]))),
                  float(np.max(np.abs(path.xdot_at(ts) - res.xdot[sub]))))
        worst = max(worst, err)
        if scen.name == "euclidean-linear":
            flat_corrective = res.corrective_iterations
            budget = existence.weissinger_budget(cert.alpha, cert.lip_F1,
                                                 cert.lip_F2, cert.k)
            flat_budget_zero = float(budget[-1]) == 0.0
    elapsed = time.time() - t0
    ok = (worst <= 1e-6 and flat_corrective == 1 and flat_budget_zero
          and elapsed < 60.0)
    assert report("5", ok,
                  f"sup disagreement {worst:.2e}, flat corrective "
                  f"iterations {flat_corrective}, a_n all zero: "
                  f"{flat_budget_zero}, {elapsed:.0f}s")


def test_criterion_6_energy_conservation():
    t0 = time.time()
    rng = np.random.default_rng(777)
    nets = scenarios.builtin_nets()
    worst = 0.0
    count = 0
    for scen in scenarios.builtin_scenarios():
        for net_name in ("mollifier", "signed"):
            for _ in range(3):
                data = InitialData(
                    scen.data.x0 + rng.uniform(-0.05, 0.05, 2),
                    scen.data.xdot0 + rng.uniform(-0.15, 0.15, 2),
                    v0=rng.uniform(-1, 1), vdot0=rng.uniform(-1, 1))
                path = integrate_impulsive_geodesic(
                    scen.model, scen.profile, nets[net_name], 0.05, data,
                    1.0, rtol=1e-10, atol=1e-10)
                e0 = path.diagnostics.energy_start
                rel = path.diagnostics.energy_drift / (1.0 + abs(e0))
                worst = max(worst, rel)
                count += 1
    elapsed = time.time() - t0
    ok = worst <= 1e-7
    assert report("6", ok,
                  f"{count} paths, worst relative drift {worst:.2e}, "
                  f"{elapsed:.0f}s")


def test_criterion_7_delta_net_gate():
    schedule = [2.0 ** -k for k in range(1, 9)]
    ok_moll = profiles.verify_strict_delta_net(NET, schedule, tol=1e-8).passed
    ok_sign = profiles.verify_strict_delta_net(profiles.signed_net(),
                                               schedule, tol=1e-8).passed
    base = profiles.mollifier_net()
    doubled = profiles.DeltaNet(lambda e, u: 2.0 * base.eval(e, u),
                                lambda e, u: 2.0 * base.deriv(e, u),
                                lambda e: e, 2.0, name="doubled")
    rep_d = profiles.verify_strict_delta_net(doubled, schedule, tol=1e-8)
    frozen = profiles.DeltaNet(lambda e, u: base.eval(1.0, u),
                               lambda e, u: base.deriv(1.0, u),
                               lambda e: 1.0, 1.0, name="frozen")
    rep_f = profiles.verify_strict_delta_net(frozen, [0.5, 0.25, 0.125],
                                             tol=1e-8)
    doubled_exact = (not rep_d.integral_ok and rep_d.supports_ok
                     and rep_d.l1_ok)
    frozen_exact = (not rep_f.supports_ok and rep_f.integral_ok
                    and rep_f.l1_ok)
    ok = ok_moll and ok_sign and doubled_exact and frozen_exact
    assert report("7", ok,
                  f"mollifier={ok_moll}, signed={ok_sign}, forced failures "
                  f"hit exactly the intended property: doubled(integral)="
                  f"{doubled_exact}, frozen(support)={frozen_exact}")


def test_criterion_8_growth_classifier():
    directions = [np.array([1.0, 0.0]), np.array([0.0, 1.0]),
                  np.array([1.0, 1.0])]
    radii = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
    results = {}
    for power, label in ((1.5, "subquadratic"), (2.0, "at-most-quadratic"),
                         (3.0, "superquadratic")):
        prof = profiles.radial_power_profile(1.0, power)
        rep = profiles.classify_growth(prof, EU, [0.0, 0.0], directions,
                                       radii)
        results[power] = (rep.exponent, rep.classification,
                          abs(rep.exponent - power) < 0.15
                          and rep.classification == label)
    ok = all(r[2] for r in results.values())
    detail = ", ".join(f"|x|^{p}: p_hat={r[0]:.3f} {r[1]}"
                       for p, r in results.items())
    assert report("8", ok, detail)
