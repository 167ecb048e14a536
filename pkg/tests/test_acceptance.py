"""Acceptance criteria, each checked at its stated tolerance.

Each test prints one PASS/FAIL line; the lines are repeated in the
terminal summary.
"""

import math
import time

import numpy as np
import pytest

from cweno_uq.cweno import (
    CwenoParameters,
    build_surrogate,
    combine_candidates,
    compute_p0,
    fit_substencil_polynomials,
    nonlinear_weights,
    smoothness_indicators,
)
from cweno_uq.experiments import FUNCTIONS, RunOptions, run_example, verify_reference_constants
from cweno_uq.gpc import build_basis, fit_gpc, gpc_moments
from cweno_uq.random_space import collocation_rule, normal, uniform, uniform_grid
from cweno_uq.stats import cweno_moments, pdf_from_surrogate, power_law_fit
from cweno_uq.swe import SweConfig, dam_break_initial, example6_topography, run_batch, run_dam_break
from oracles import stoker_depth

SQRT45 = math.sqrt(4.5)


def test_criterion_1_exact_moments(verdict):
    f = FUNCTIONS["eq31"]
    t0 = time.perf_counter()
    grid = uniform_grid((-1, 1), 19)
    cw = cweno_moments(build_surrogate(grid, f(grid.nodes)), uniform(), 4)
    gp = gpc_moments(fit_gpc(uniform(), f, 15))
    elapsed = time.perf_counter() - t0
    checks = {
        "cweno7 mu": abs(cw.mean) < 1e-8,
        "cweno7 sigma": abs(cw.std - SQRT45) < 1e-6,
        "gpc mu": abs(gp.mean) < 1e-8,
        "gpc sigma": abs(gp.std - SQRT45) < 1e-6,
        "runtime": elapsed < 1.0,
    }
    detail = (
        f"cweno7 L=19 |mu|={abs(cw.mean):.2e} (<1e-8) |sigma-ref|={abs(cw.std - SQRT45):.2e} (<1e-6); "
        f"gpc L=15 |mu|={abs(gp.mean):.2e} |sigma-ref|={abs(gp.std - SQRT45):.2e}; {elapsed:.3f} s; "
        f"failing: {[k for k, ok in checks.items() if not ok] or 'none'}"
    )
    assert verdict("criterion 1 (exact moments)", all(checks.values()), detail)


def test_criterion_2_reference_constants(verdict):
    t0 = time.perf_counter()
    gaps = verify_reference_constants()
    Ls = [9, 11, 21, 31, 41, 61, 81]
    r = run_example(1, "test2", Ls, "cweno7", options=RunOptions(samples_1d=10**4))
    elapsed = time.perf_counter() - t0
    k_mu = r.fits["cweno7"]["err_mu"]["exponent"]
    k_sigma = r.fits["cweno7"]["err_sigma"]["exponent"]
    ok = (
        max(gaps.values()) < 1e-9
        and abs(k_mu - 8.3) <= 2.5
        and abs(k_sigma - 6.2) <= 2.5
        and elapsed < 30
    )
    detail = (
        f"max oracle gap {max(gaps.values()):.1e} (<1e-9); exponents mu {k_mu:.2f} (8.3+-2.5), "
        f"sigma {k_sigma:.2f} (6.2+-2.5); {elapsed:.1f} s"
    )
    assert verdict("criterion 2 (reference constants)", ok, detail)


def test_criterion_3_smooth_orders(verdict):
    r = run_example(1, "test1", list(range(7, 20, 2)), "both", options=RunOptions(samples_1d=10**4))
    k_cw = r.fits["cweno7"]["l1_U"]["exponent"]
    fit = r.fits["gpc"]["l1_U"]
    ok = k_cw >= 7 and fit["exponent"] >= 15
    detail = f"cweno7 {k_cw:.2f} (>=7); gpc {fit['exponent']:.2f} (>=15) on L={fit['used_L']}"
    assert verdict("criterion 3 (smooth convergence orders)", ok, detail)


def _overshoot(sur, samples, x, jump):
    v = sur(x)
    return max(0.0, float(v.max() - samples.max()), float(samples.min() - v.min())) / jump


@pytest.mark.slow
def test_criterion_4_gibbs_dichotomy(verdict):
    Ls = [7, 9, 11, 13, 51]
    r = run_example(4, None, Ls, "both")
    k_cw = r.fits["cweno7"]["l1_pdf"]["exponent"]
    k_gp = r.fits["gpc"]["l1_pdf"]["exponent"]

    # excursion beyond the sampled values, relative to the jump at the split
    f = FUNCTIONS["eq34"]
    jump = 6 * math.cos(0.1 * math.pi)
    x = np.linspace(-1, 1, 20001)
    over_cw, over_gp = {}, {}
    for L in Ls:
        grid = uniform_grid((-1, 1), L)
        over_cw[L] = _overshoot(build_surrogate(grid, f(grid.nodes)), f(grid.nodes), x, jump)
        rule = collocation_rule(uniform(), L)
        nodes, _ = rule.mapped(uniform())
        over_gp[L] = _overshoot(fit_gpc(uniform(), f, L), f(nodes), x, jump)
    # with L = 7 a single stencil spans every node, so no stencil avoids the jump
    checked = [L for L in Ls if L > 7]
    ok = (
        k_gp < 1
        and 2 <= k_cw <= 5
        and all(over_cw[L] <= 0.01 for L in checked)
        and all(over_gp[L] >= 0.05 for L in Ls)
    )
    fmt = lambda d: ", ".join(f"{L}:{v:.2%}" for L, v in d.items())
    detail = (
        f"pdf exponents gpc {k_gp:.3f} (<1), cweno7 {k_cw:.2f} (in [2,5]); "
        f"overshoot cweno7 {fmt(over_cw)} (<=1% for L>=9); gpc {fmt(over_gp)} (>=5%)"
    )
    assert verdict("criterion 4 (Gibbs dichotomy)", ok, detail)


def test_criterion_5_two_dimensional(verdict):
    t0 = time.perf_counter()
    options = RunOptions(samples_2d=(1000, 1000))
    sep = run_example(3, None, [21], "cweno7", options=options).checks["separable_mean_gap"]["L=21,M=21"]
    r = run_example(5, None, [11, 21, 31], "both", [21, 31, 41], options=options)
    elapsed = time.perf_counter() - t0
    err = {m: [row["l1_pdf"] for row in r.rows if row["method"] == m] for m in ("cweno7", "gpc")}
    ok = (
        sep < 1e-8
        and all(a > b for a, b in zip(err["cweno7"], err["cweno7"][1:]))
        and err["gpc"][0] / err["gpc"][-1] < 2
        and elapsed < 120
    )
    detail = (
        f"separable gap {sep:.1e} (<1e-8); cweno7 pdf errors {np.round(err['cweno7'], 4).tolist()} "
        f"(decreasing); gpc reduction x{err['gpc'][0] / err['gpc'][-1]:.2f} (<2); {elapsed:.1f} s"
    )
    assert verdict("criterion 5 (2-D machinery)", ok, detail)


def test_criterion_6_property_suites(verdict):
    rng = np.random.default_rng(6)
    values = np.concatenate([
        rng.normal(size=(500, 7)),
        np.where(np.arange(7) < rng.integers(1, 7, size=(500, 1)), 1.0, -1.0),
    ])
    params = CwenoParameters()
    p_opt, cands = fit_substencil_polynomials(values)
    p0 = compute_p0(p_opt, cands, params)
    beta = smoothness_indicators([p0, *cands])
    _, omega = nonlinear_weights(beta, 0.1)
    R = combine_candidates([p0, *cands], omega)
    linear = combine_candidates([p0, *cands], np.broadcast_to(params.d, (1000, 5)))
    stencils = (
        np.all(omega >= 0)
        and np.abs(omega.sum(axis=1) - 1).max() < 1e-14
        and np.abs(R.local(0.0) - values[:, 3]).max() < 1e-12
        and np.abs(linear.coeffs - p_opt.coeffs).max() < 1e-12
    )

    gram = {}
    for name, dist in (("legendre", uniform()), ("hermite", normal())):
        x, w = collocation_rule(dist, 41).mapped(dist)
        V = build_basis(dist, 40).vandermonde(x)
        gram[name] = np.abs((V * w[:, None]).T @ V - np.eye(41)).max()

    masses = [
        pdf_from_surrogate(lambda x, a=a: a * x + np.sin(5 * x) ** 3, uniform(), 10**4).mass
        for a in (-3.0, 0.0, 0.5, 7.0)
    ]
    mass_gap = max(abs(m - 1) for m in masses)

    Ls = np.array([7, 9, 11, 13, 15])
    planted = [(2.0, 3.5), (0.1, 9.0), (50.0, 1.25)]
    fit_gap = max(abs(power_law_fit(Ls, a * Ls.astype(float) ** -k).exponent - k) for a, k in planted)

    ok = stencils and max(gram.values()) < 1e-12 and mass_gap <= 1e-9 and fit_gap < 1e-10
    detail = (
        f"10^3 stencils {'ok' if stencils else 'violated'}; gram deg 40 "
        f"{max(gram.values()):.1e} (<1e-12); unit mass {mass_gap:.1e} (<=1e-9); "
        f"planted exponent gap {fit_gap:.1e}"
    )
    assert verdict("criterion 6 (property suites)", ok, detail)


@pytest.mark.slow
def test_criterion_7_shallow_water(verdict):
    config = SweConfig()
    rest = run_batch(
        config,
        [lambda x, v=v: example6_topography(x, v) for v in (-1.0, -0.5, 0.0, 0.5, 1.0)],
        [lambda x: (np.ones_like(x), np.zeros_like(x))] * 5,
    )
    rest_gap = max(np.abs(rest.w - 1).max(), np.abs(rest.hu).max())

    flat = run_dam_break(config, np.zeros_like, dam_break_initial)
    stoker = np.sum(np.abs(flat.h - stoker_depth(flat.x, config.final_time))) * config.dx

    t0 = time.perf_counter()
    r = run_example(6, None, [32], "both")
    elapsed = time.perf_counter() - t0
    agree = r.checks["mean_relative_l1"]["L=32"]
    tv = r.checks["total_variation"]["x=0.09125"]
    ok = (
        rest_gap < 1e-12
        and stoker < 2e-2
        and elapsed < 600
        and agree < 0.01
        and tv["gpc/L=32"] > tv["cweno7/L=32"]
    )
    detail = (
        f"lake at rest {rest_gap:.1e} (<1e-12); dam break L1 {stoker:.2e} (<2e-2); "
        f"full study {elapsed:.0f} s (<600); mean rel L1 {agree:.1e} (<1e-2); "
        f"TV at 0.09125 gpc {tv['gpc/L=32']:.1f} > cweno7 {tv['cweno7/L=32']:.1f}"
    )
    assert verdict("criterion 7 (shallow-water solver)", ok, detail)
