"""End-to-end acceptance gate: nine numbered criteria, one test (and one
pass/fail line) each.

Reference error tables are stored as strings so the printed digit count
determines the tolerance: entries match within two units of the last
reported digit after trailing zeros are stripped (at least one decimal is
kept), with the two explicitly stated looser entries overridden below.
"""

import numpy as np
import pytest
from scipy.integrate import simpson

import lvkernel as lv
from conftest import (
    GaussianPayoff,
    cev_order1_reference,
    lognormal_order1_reference,
    lognormal_order2_reference_correction,
)

# --- order-1 closed-form error tables: |exact - approx| in units of 1e-3,
#     strike 15, sigma 0.3, spot x = 12..18 -----------------------------------

TABLE_DRIFTLESS = {  # r = 0
    0.01: ["0.0000", "0.0000", "0.0313", "0.3266", "0.0387", "0.0019", "0.0000"],
    0.05: ["0.0461", "0.3385", "0.0179", "0.3915", "0.0179", "0.4068", "0.3957"],
    0.1:  ["0.7", "0.7", "0.2", "0.5", "0.2", "0.4", "1.2"],
    0.2:  ["2.2", "0.3", "0.7", "0.9", "0.7", "0.3", "1.3"],
    0.5:  ["1.2", "2.1", "2.5", "2.7", "2.7", "2.9", "1.9"],
}

TABLE_WITH_DRIFT = {  # r = 0.1
    0.01: ["0.0000", "0.0000", "0.1000", "0.0000", "0.9000", "2.0000", "3.0000"],
    0.05: ["0.1", "0.9", "1.4", "0.1", "3.6", "8.7", "14.5"],
    0.1:  ["1.7", "3.8", "3.3", "0.3", "7.0", "15.9", "26.4"],
    0.2:  ["9.3", "10.7", "7.1", "1.2", "14.0", "30.2", "48.8"],
    0.5:  ["39.0", "31.4", "15.1", "8.4", "39.4", "76.0", "116.8"],
}

# (t, x) -> tolerance in 1e-3 units, replacing the digit rule for the two
# entries whose tolerances are stated explicitly.
WITH_DRIFT_OVERRIDES = {(0.5, 18.0): 5.0, (0.01, 18.0): 1.0}

TABLE_XS = np.arange(12.0, 19.0)


def _digit_tolerance(entry: str) -> float:
    """Two units of the last significant reported digit, in table units."""
    s = entry
    if "." in s:
        s = s.rstrip("0")
        if s.endswith("."):
            s += "0"
    decimals = len(s.split(".")[1]) if "." in s else 0
    return 2.0 * 10.0 ** (-decimals)


def _table_misses(table, r, overrides=()):
    model = lv.BSMModel(sigma=0.3, r=r)
    misses = []
    for t, row in table.items():
        exact = lv.bs_exact(t, 15.0, TABLE_XS, 0.3, r)
        approx = lv.price_call_closed(1, model, t, 15.0, TABLE_XS)
        errors = np.abs(exact - approx) * 1e3
        for x, got, entry in zip(TABLE_XS, errors, row):
            tol = dict(overrides).get((t, x), _digit_tolerance(entry))
            if abs(got - float(entry)) > tol:
                misses.append(
                    f"(t={t}, x={x:g}): |error| {got:.4f}e-3 vs table "
                    f"{entry}e-3 +/- {tol:g}e-3"
                )
    return misses


def _report(number: int, ok: bool, detail: str) -> None:
    print(f"[criterion {number}] {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_order1_error_table_driftless():
    misses = _table_misses(TABLE_DRIFTLESS, r=0.0)
    ok = not misses
    _report(1, ok, f"driftless order-1 error table, {35 - len(misses)}/35 "
                   f"entries within digit tolerance")
    assert ok, (
        "driftless order-1 error table mismatches:\n  " + "\n  ".join(misses)
    )


def test_criterion_2_order1_error_table_with_drift():
    misses = _table_misses(TABLE_WITH_DRIFT, r=0.1,
                           overrides=WITH_DRIFT_OVERRIDES)
    ok = not misses
    _report(2, ok, f"order-1 error table with drift 0.1, {35 - len(misses)}/35 "
                   f"entries within digit tolerance")
    assert ok, (
        "order-1 error table (drift 0.1) mismatches:\n  " + "\n  ".join(misses)
    )


def test_criterion_3_bootstrap_error_table():
    reference = {1.0: 0.0177, 0.5: 0.0038, 0.2: 4.37e-4, 0.1: 3.57e-5}
    model = lv.BSMModel(sigma=0.5, r=0.1)
    spec = lv.KernelSpec(model=model, order=2)
    grid = lv.SpatialGrid.regular(200.0, 0.1)
    payoff = lv.CallPayoff(20.0)
    xs = grid.nodes
    window = (xs > 0.0) & (xs <= 40.0)
    lines, bad = [], []
    for t, ref in reference.items():
        cfg = lv.BootstrapConfig(spec=spec, t_total=t, n_steps=10, grid=grid)
        curve = lv.bootstrap_solve(cfg, payoff)
        err = float(np.max(np.abs(
            curve.values[window] - lv.bs_exact(t, 20.0, xs[window], 0.5, 0.1)
        )))
        ratio = err / ref
        lines.append(f"t={t}: sup error {err:.4e} vs reference {ref:g} "
                     f"(ratio {ratio:.3f})")
        if not (1.0 / 3.0 <= ratio <= 3.0):
            bad.append(lines[-1])
    ok = not bad
    _report(3, ok, "10-step bootstrap sup errors on (0, 40]: "
                   + "; ".join(lines))
    assert ok, (
        "bootstrap sup errors outside factor-3 band of the reference "
        "values:\n  " + "\n  ".join(bad)
    )


def test_criterion_4_greeks_accuracy():
    t, K = 0.5, 20.0
    model = lv.BSMModel(sigma=0.5, r=0.1)

    dx = 0.1
    xs = np.arange(dx, 40.0 + dx / 2, dx)
    inner = xs[1:-1]
    up = lv.price_call_closed(2, model, t, K, xs[2:])
    dn = lv.price_call_closed(2, model, t, K, xs[:-2])
    mid = lv.price_call_closed(2, model, t, K, inner)
    delta_err = float(np.max(np.abs(
        (up - dn) / (2 * dx) - lv.bs_delta(t, K, inner, 0.5, 0.1)
    )))
    gamma_err = float(np.max(np.abs(
        (up + dn - 2 * mid) / dx**2 - lv.bs_gamma(t, K, inner, 0.5, 0.1)
    )))

    grid = lv.SpatialGrid.regular(400.0, 0.1)
    cfg = lv.BootstrapConfig(spec=lv.KernelSpec(model=model, order=2),
                             t_total=t, n_steps=10, grid=grid)
    curve = lv.bootstrap_solve(cfg, lv.CallPayoff(K))
    xi, bdelta, bgamma = lv.curve_greeks(curve)
    msk = (xi > 0.0) & (xi <= 40.0)
    bdelta_err = float(np.max(np.abs(
        bdelta[msk] - lv.bs_delta(t, K, xi[msk], 0.5, 0.1)
    )))
    bgamma_err = float(np.max(np.abs(
        bgamma[msk] - lv.bs_gamma(t, K, xi[msk], 0.5, 0.1)
    )))

    ok = (delta_err <= 2.0e-2 and gamma_err <= 2.0e-2
          and bdelta_err <= 1.0e-3 and bgamma_err <= 2.0e-4)
    detail = (f"closed-form delta {delta_err:.4e} (<= 2e-2), gamma "
              f"{gamma_err:.4e} (<= 2e-2); bootstrap delta {bdelta_err:.4e} "
              f"(<= 1e-3), gamma {bgamma_err:.4e} (<= 2e-4)")
    _report(4, ok, detail)
    assert ok, detail


def test_criterion_5_short_time_convergence_order():
    K = 15.0
    model = lv.BSMModel(sigma=0.3, r=0.1)
    grid = lv.SpatialGrid.regular(60.0, 0.005)
    ys = grid.nodes
    bump = np.exp(-((ys - 12.0) ** 2) / (2.0 * 1.5**2))
    payoff = lv.SampledPayoff(ys, bump)
    ts = np.array([0.02, 0.04, 0.08, 0.16])
    slopes = {}
    for order in (1, 2):
        spec = lv.KernelSpec(model=model, order=order)
        errs = []
        for t in ts:
            exact = float((lv.bs_kernel(t, K, ys, 0.3, 0.1) * bump)
                          @ grid.weights)
            errs.append(abs(lv.price_quadrature(spec, t, payoff, K, grid)
                            - exact))
        slopes[order] = float(np.polyfit(np.log(ts), np.log(errs), 1)[0])
    ok = slopes[1] >= 1.0 and slopes[2] >= 1.5
    detail = (f"log-log error slopes in t at x=K for a smooth bump payoff: "
              f"order 1 {slopes[1]:.3f} (>= 1.0), order 2 {slopes[2]:.3f} "
              f"(>= 1.5)")
    _report(5, ok, detail)
    assert ok, detail


def test_criterion_6_kernel_mass_identities():
    rng = np.random.default_rng(20240915)
    worst = 0.0
    for draw in range(50):
        kind = draw % 3
        sigma = float(rng.uniform(0.2, 0.6))
        r = float(rng.uniform(0.0, 0.12))
        if kind == 0:
            model = lv.BSMModel(sigma=sigma, r=r)
        elif kind == 1:
            model = lv.CEVModel(sigma=sigma, alpha=float(rng.uniform(0.5, 1.0)),
                                r=r)
        else:
            model = lv.TimeDependentBSMModel(
                sigma=sigma, sigma_dot0=float(rng.uniform(-0.1, 0.2)), r=r)
        # the state space is the positive half-line, so redraw until the
        # +/- 10 standard deviation window clears zero
        while True:
            x = float(rng.uniform(5.0, 25.0))
            t = float(rng.uniform(0.01, 0.3))
            jet = model.jet(x)
            width = 10.0 * float(jet.a) * np.sqrt(t)
            if width < x - 0.5:
                break
        ys = np.linspace(x - width, x + width, 4001)
        targets = {0: 1.0, 1: 1.0, 2: 1.0 + float(jet.c) * t}
        for order, target in targets.items():
            spec = lv.KernelSpec(model=model, order=order)
            mass = simpson(lv.kernel_eval(spec, t, x, ys), x=ys)
            worst = max(worst, abs(mass - target))
    ok = worst <= 1e-8
    detail = (f"quadrature mass defects for orders 0/1/2 over 50 random "
              f"draws: worst {worst:.3e} (<= 1e-8)")
    _report(6, ok, detail)
    assert ok, detail


def test_criterion_7_reduction_checks():
    checks = []

    # power-law model with unit exponent degenerates to the lognormal model
    bsm = lv.BSMModel(sigma=0.3, r=0.1)
    cev1 = lv.CEVModel(sigma=0.3, alpha=1.0, r=0.1)
    ys = np.linspace(10.0, 20.0, 41)
    for order in (0, 1, 2):
        a = lv.kernel_eval(lv.KernelSpec(model=bsm, order=order), 0.1, 15.0, ys)
        b = lv.kernel_eval(lv.KernelSpec(model=cev1, order=order), 0.1, 15.0, ys)
        checks.append((f"kernel order {order}",
                       float(np.max(np.abs(a - b)) / np.max(np.abs(a)))))
    xs = np.array([12.0, 15.0, 18.0])
    for order in (1, 2):
        a = lv.price_call_closed(order, bsm, 0.2, 15.0, xs)
        b = lv.price_call_closed(order, cev1, 0.2, 15.0, xs)
        checks.append((f"closed price order {order}",
                       float(np.max(np.abs(a - b) / np.abs(a)))))
    da, ga = lv.greeks(lambda t, x: lv.price_call_closed(2, bsm, t, 15.0, x),
                       0.2, 14.0, 0.05)
    db, gb = lv.greeks(lambda t, x: lv.price_call_closed(2, cev1, t, 15.0, x),
                       0.2, 14.0, 0.05)
    checks.append(("delta", abs(da - db) / abs(da)))
    checks.append(("gamma", abs(ga - gb) / abs(ga)))

    # general-basepoint kernels on the diagonal equal the specialized forms
    t, x = 0.1, 15.0
    ys = np.linspace(11.0, 19.0, 33)
    got = lv.kernel_eval(lv.KernelSpec(model=bsm, order=1), t, x, ys)
    want = lognormal_order1_reference(t, x, ys, 0.3, 0.1)
    checks.append(("lognormal order-1 specialization",
                   float(np.max(np.abs(got - want)) / np.max(np.abs(want)))))
    got2 = (lv.kernel_eval(lv.KernelSpec(model=bsm, order=2), t, x, ys)
            - lv.kernel_eval(lv.KernelSpec(model=bsm, order=1), t, x, ys))
    want2 = lognormal_order2_reference_correction(t, x, ys, 0.3, 0.1)
    checks.append(("lognormal order-2 correction",
                   float(np.max(np.abs(got2 - want2)) / np.max(np.abs(want2)))))
    cev = lv.CEVModel(sigma=0.4, alpha=2.0 / 3.0, r=0.05)
    gotc = lv.kernel_eval(lv.KernelSpec(model=cev, order=1), t, x, ys)
    wantc = cev_order1_reference(t, x, ys, 0.4, 2.0 / 3.0, 0.05)
    checks.append(("power-law order-1 specialization",
                   float(np.max(np.abs(gotc - wantc)) / np.max(np.abs(wantc)))))

    worst_name, worst = max(checks, key=lambda c: c[1])
    ok = worst <= 1e-12
    detail = (f"unit-exponent and diagonal-specialization reductions: worst "
              f"relative deviation {worst:.3e} ({worst_name}) (<= 1e-12)")
    _report(7, ok, detail)
    assert ok, detail


def test_criterion_8_pde_oracle_cross_validation():
    model = lv.BSMModel(sigma=0.3, r=0.1)
    K, t = 15.0, 0.1
    grid = lv.SpatialGrid.regular(60.0, 0.01)

    cfg = lv.CNConfig(grid=grid, dt=1e-4, t_total=t)
    curve = lv.cn_solve(model, cfg, lv.CallPayoff(K))
    near = (curve.x >= 10.0) & (curve.x <= 20.0)
    vs_exact = float(np.max(np.abs(
        curve.values[near] - lv.bs_exact(t, K, curve.x[near], 0.3, 0.1)
    )))

    # self-convergence in dt on a fixed grid, smooth initial data
    bump = GaussianPayoff(15.0, 1.0)
    sols = []
    for dt in (4e-3, 2e-3, 1e-3):
        c = lv.cn_solve(model, lv.CNConfig(grid=grid, dt=dt, t_total=t), bump)
        sols.append(c.values[near])
    e1 = float(np.max(np.abs(sols[0] - sols[1])))
    e2 = float(np.max(np.abs(sols[1] - sols[2])))
    dt_slope = float(np.log2(e1 / e2))

    # self-convergence in dx on nested grids, read at shared nodes
    xq = 12.0 + 0.04 * np.arange(151)
    reads = []
    for dx in (0.04, 0.02, 0.01):
        g = lv.SpatialGrid.regular(60.0, dx)
        c = lv.cn_solve(model, lv.CNConfig(grid=g, dt=1e-4, t_total=t), bump)
        idx = np.rint((xq - g.x_min) / dx).astype(int)
        reads.append(c.values[idx])
    e1 = float(np.max(np.abs(reads[0] - reads[1])))
    e2 = float(np.max(np.abs(reads[1] - reads[2])))
    dx_slope = float(np.log2(e1 / e2))

    ok = vs_exact < 1e-4 and 1.7 <= dt_slope <= 2.3 and 1.7 <= dx_slope <= 2.3
    detail = (f"CN vs exact lognormal near the strike {vs_exact:.3e} "
              f"(< 1e-4); self-convergence slopes dt {dt_slope:.3f}, dx "
              f"{dx_slope:.3f} (both within 2.0 +/- 0.3)")
    _report(8, ok, detail)
    assert ok, detail


def test_criterion_9_equivalent_vol_comparison_near_strike():
    sigma, beta, r, K = 0.3, 2.0 / 3.0, 0.1, 20.0
    cev = lv.CEVModel(sigma=sigma, alpha=beta, r=r)
    grid = lv.SpatialGrid.regular(30.0, 0.1)
    lines, bad = [], []
    for t in (0.3, 0.5):
        cfg = lv.CNConfig(grid=grid, dt=5e-4, t_total=t)
        cn = lv.cn_solve(cev, cfg, lv.CallPayoff(K))
        msk = (cn.x >= 17.95) & (cn.x <= 22.05)
        xq, ref = cn.x[msk], cn.values[msk]
        ours = lv.price_call_closed(2, cev, t, K, xq)
        equiv = lv.hagan_woodward_price(t, K, xq, sigma, beta, r)
        closer = np.abs(ours - ref) < np.abs(equiv - ref)
        frac = float(np.mean(closer))
        lines.append(
            f"t={t}: closed form closer to CN than the equivalent-vol price "
            f"on {int(closer.sum())}/{closer.size} nodes ({frac:.0%}); "
            f"max|closed-CN| {np.max(np.abs(ours - ref)):.3e}, "
            f"max|equiv-CN| {np.max(np.abs(equiv - ref)):.3e}"
        )
        if frac < 0.6:
            bad.append(lines[-1])
    ok = not bad
    _report(9, ok, "; ".join(lines))
    assert ok, (
        "closed form is not closer to the CN oracle on >= 60% of nodes in "
        "[18, 22]:\n  " + "\n  ".join(bad)
    )
