"""Test functions and drivers for the seven numbered experiments.

Examples 1-5 build surrogates of closed-form functions of one or two
random variables and compare moments, surrogate values and PDFs with
reference data. Examples 6-7 take the surrogate inputs from batched
shallow-water runs, one per collocation point.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from cweno_uq.cweno import (
    DEFAULT_PARAMETERS,
    CwenoParameters,
    CwenoSurrogate2D,
    build_surrogate,
)
from cweno_uq.gpc import (
    build_basis,
    build_tensor_surrogate,
    fit_gpc,
    fit_gpc_2d,
    gpc_moments,
    project_coefficients,
)
from cweno_uq.random_space import (
    DistributionSpec,
    collocation_rule,
    normal,
    uniform,
    uniform_grid,
)
from cweno_uq.stats import (
    InsufficientDataError,
    MomentEstimate,
    PdfEstimate,
    cweno_moments,
    l1_distance_simpson,
    moments_2d,
    pdf_from_surrogate,
    pdf_l1_error,
    power_law_fit,
)
from cweno_uq.swe import SweConfig, dam_break_initial, example6_topography, run_batch

__all__ = [
    "TestFunction",
    "FUNCTIONS",
    "RunOptions",
    "ExperimentReport",
    "EXAMPLES",
    "reference_moments",
    "verify_reference_constants",
    "run_example",
    "validate_request",
]

log = logging.getLogger(__name__)

METHODS = ("cweno7", "gpc")
SPLIT = 0.1


# {{{ test functions


@dataclass(frozen=True)
class TestFunction:
    """A closed-form model output ``U(xi)`` or ``U(xi, eta)``.

    ``breaks`` lists the input values at which ``U`` jumps, in every
    variable; adaptive quadrature splits its intervals there.
    """

    __test__ = False

    identifier: str
    arity: int
    rule: Callable
    breaks: tuple[float, ...] = ()

    def __call__(self, xi, eta=None):
        xi = np.asarray(xi, dtype=float)
        if self.arity == 1:
            if eta is not None:
                raise ValueError(f"{self.identifier} takes one argument")
            return self.rule(xi)
        if eta is None:
            raise ValueError(f"{self.identifier} takes two arguments")
        return self.rule(xi, np.asarray(eta, dtype=float))


def _eq31(xi):
    return 3.0 * np.cos(np.pi * xi)


def _eq32(xi):
    return np.tanh(9.0 * xi) + 0.5 * xi


def _eq33(xi, eta):
    return 3.0 * np.cos(np.pi * xi) * np.cos(np.pi * eta)


# the split point itself belongs to the left branch
def _eq34(xi):
    return np.where(xi <= SPLIT, 1.0, -1.0) * _eq31(xi)


def _eq35(xi, eta):
    return np.where((xi <= SPLIT) & (eta <= SPLIT), 1.0, -1.0) * _eq33(xi, eta)


FUNCTIONS = {
    "eq31": TestFunction("eq31", 1, _eq31),
    "eq32": TestFunction("eq32", 1, _eq32),
    "eq33": TestFunction("eq33", 2, _eq33),
    "eq34": TestFunction("eq34", 1, _eq34, (SPLIT,)),
    "eq35": TestFunction("eq35", 2, _eq35, (SPLIT,)),
}


# }}}


# {{{ reference moments

# (function, distributions) -> (mean, variance) as published
_STORED = (
    ("eq31", (uniform(),), 0.0, 4.5),
    ("eq31", (normal(),), 0.021575650067, 4.499534503363),
    ("eq32", (uniform(),), 0.0, 1.467145270396),
)

_QUAD = dict(epsabs=1e-13, epsrel=1e-12, limit=400)


def _as_dists(dists) -> tuple[DistributionSpec, ...]:
    return (dists,) if isinstance(dists, DistributionSpec) else tuple(dists)


def _pieces(dist: DistributionSpec, breaks):
    """Integration intervals over the full support, split at ``breaks``."""
    if dist.kind == "uniform":
        lo, hi = dist.params
    else:
        lo, hi = -math.inf, math.inf
    cuts = [b for b in breaks if lo < b < hi]
    ends = [lo, *cuts, hi]
    return list(zip(ends[:-1], ends[1:]))


def _expect(g, dist: DistributionSpec, breaks) -> float:
    def weighted(x):
        return float(g(x)) * float(dist.pdf(x))

    return sum(integrate.quad(weighted, a, b, **_QUAD)[0] for a, b in _pieces(dist, breaks))


def _quadrature_moments(fn: TestFunction, dists) -> tuple[float, float]:
    if fn.arity == 1:
        (d,) = dists
        mean = _expect(fn, d, fn.breaks)
        var = _expect(lambda x: (fn(x) - mean) ** 2, d, fn.breaks)
        return mean, var

    dx, dy = dists

    def nested(g):
        return _expect(lambda y: _expect(lambda x: g(x, y), dx, fn.breaks), dy, fn.breaks)

    mean = nested(fn)
    var = nested(lambda x, y: (fn(x, y) - mean) ** 2)
    return mean, var


def _stored(fn: TestFunction, dists):
    for ident, ds, mean, var in _STORED:
        if ident == fn.identifier and ds == dists:
            return mean, var
    return None


def reference_moments(fn: TestFunction | str, dists) -> MomentEstimate:
    """Published moments where available, adaptive quadrature otherwise.

    Moments are taken over the full support of each distribution, so a
    normal input is not truncated to its collocation span.
    """
    fn = FUNCTIONS[fn] if isinstance(fn, str) else fn
    dists = _as_dists(dists)
    if len(dists) != fn.arity:
        raise ValueError(f"{fn.identifier} needs {fn.arity} distribution(s)")
    found = _stored(fn, dists)
    mean, var = found if found is not None else _quadrature_moments(fn, dists)
    return MomentEstimate(mean, math.sqrt(var))


@lru_cache(maxsize=None)
def verify_reference_constants(tol: float = 1e-9) -> dict[str, float]:
    """Check every stored constant against adaptive quadrature.

    Returns the largest mean/std discrepancy per entry and raises
    ``RuntimeError`` if any exceeds ``tol``.
    """
    out = {}
    for ident, dists, mean, var in _STORED:
        qm, qv = _quadrature_moments(FUNCTIONS[ident], dists)
        gap = max(abs(qm - mean), abs(math.sqrt(qv) - math.sqrt(var)))
        key = f"{ident}/{'-'.join(d.kind for d in dists)}"
        out[key] = gap
        if not gap <= tol:
            raise RuntimeError(f"stored reference {key} differs from quadrature by {gap:.3e}")
    return out


# }}}


# {{{ configuration and report


@dataclass(frozen=True)
class RunOptions:
    """Numerical settings shared by all experiments; defaults follow the published runs."""

    J: int = 4
    params: CwenoParameters = DEFAULT_PARAMETERS
    samples_1d: int = 30_000_000
    samples_2d: tuple[int, int] = (10_000, 10_000)
    simpson_subintervals: int = 20_000
    swe: SweConfig = field(default_factory=SweConfig)
    slice_points: int = 401

    def __post_init__(self):
        if self.J < 1:
            raise ValueError("J must be >= 1")
        if self.simpson_subintervals < 2 or self.simpson_subintervals % 2:
            raise ValueError("the Simpson subinterval count must be even")


@dataclass
class ExperimentReport:
    experiment: str
    methods: tuple[str, ...]
    settings: dict
    rows: list[dict] = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    pdfs: dict[str, dict[str, PdfEstimate]] = field(default_factory=dict)
    fields: dict[str, dict[str, np.ndarray]] = field(default_factory=dict)
    slices: dict[str, dict[str, np.ndarray]] = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    x: np.ndarray | None = None

    @property
    def is_swe(self) -> bool:
        return self.x is not None

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {
            "experiment": self.experiment,
            "methods": list(self.methods),
            "settings": _plain(self.settings),
            "rows": _plain(self.rows),
            "fits": _plain(self.fits),
            "pdfs": {
                label: {
                    name: {
                        "bin_edges": _plain(p.bin_edges),
                        "densities": _plain(p.densities),
                        "degenerate": p.degenerate,
                    }
                    for name, p in group.items()
                }
                for label, group in self.pdfs.items()
            },
            "checks": _plain(self.checks),
        }
        if self.is_swe:
            out["x"] = _plain(self.x)
            out["fields"] = _plain(self.fields)
            out["slices"] = _plain(self.slices)
        if include_timings:
            out["timings"] = _plain(self.timings)
        return out


def _plain(obj):
    """Recursively convert numpy scalars and arrays to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass(frozen=True)
class _Setup:
    function: str | None
    dists: tuple[DistributionSpec, ...]
    Ls: tuple[int, ...]
    Ms: tuple[int, ...] | None = None
    x_points: tuple[float, ...] = ()


EXAMPLES: dict[str, _Setup] = {
    "1-test1": _Setup("eq31", (uniform(),), (7, 9, 11, 13, 15, 17, 19)),
    "1-test2": _Setup("eq31", (normal(),), (9, 11, 21, 31, 41, 61, 81)),
    "2": _Setup("eq32", (uniform(),), (21, 31, 41, 51, 61, 81)),
    "3": _Setup("eq33", (uniform(), normal()), (21, 31, 41, 51), (21, 31, 41, 51)),
    "4": _Setup("eq34", (uniform(),), (7, 9, 11, 13, 51)),
    "5": _Setup("eq35", (uniform(), normal()), (11, 21, 31, 41, 51), (21, 31, 41, 51, 61)),
    "6": _Setup(None, (uniform(),), (32, 64), None, (0.05125, 0.05625, 0.06125, 0.09125)),
    "7": _Setup(None, (uniform(), uniform()), (32,), (32,), (0.07625,)),
}


def _key(example: int, variant: str | None) -> str:
    if example not in range(1, 8):
        raise ValueError(f"unknown example {example!r}; expected 1..7")
    if example == 1:
        if variant not in ("test1", "test2"):
            raise ValueError("example 1 needs variant 'test1' or 'test2'")
        return f"1-{variant}"
    if variant is not None:
        raise ValueError(f"example {example} has no variants")
    return str(example)


def _methods(method: str) -> tuple[str, ...]:
    if method == "both":
        return METHODS
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected cweno7, gpc or both")
    return (method,)


def _check_sizes(key: str, methods, Ls, Ms, setup: _Setup) -> None:
    if not Ls:
        raise ValueError("at least one L value is required")
    two_d = len(setup.dists) == 2
    if two_d and (Ms is None or len(Ms) != len(Ls)):
        raise ValueError("two random variables need one M value per L value")
    if not two_d and Ms is not None:
        raise ValueError(f"example {key} has one random variable; M does not apply")
    sizes = list(Ls) + list(Ms or ())
    if any(int(n) != n or n < 1 for n in sizes):
        raise ValueError("L and M values must be positive integers")
    if "cweno7" in methods:
        if any(n < 7 for n in sizes):
            raise ValueError("CWENO7 needs L, M >= 7")
        if setup.function is not None and any(n % 2 == 0 for n in sizes):
            raise ValueError("CWENO7 studies of the closed-form examples use odd L, M")


# }}}


def validate_request(example: int, variant, method: str, Ls=None, Ms=None):
    """Check a run request; returns ``(key, methods, Ls, Ms)`` with defaults filled in."""
    key = _key(example, variant)
    setup = EXAMPLES[key]
    methods = _methods(method)
    Ls = tuple(int(n) for n in (setup.Ls if Ls is None else Ls))
    if Ms is None and setup.Ms is not None:
        Ms = setup.Ms if len(setup.Ms) == len(Ls) else Ls
    Ms = None if Ms is None else tuple(int(n) for n in Ms)
    _check_sizes(key, methods, Ls, Ms, setup)
    return key, methods, Ls, Ms


def run_example(
    example: int,
    variant: str | None = None,
    Ls: Sequence[int] | None = None,
    method: str = "both",
    Ms: Sequence[int] | None = None,
    options: RunOptions | None = None,
) -> ExperimentReport:
    """Run one numbered experiment and collect its statistics.

    ``Ls`` (and ``Ms`` for two random variables) default to the published
    study; for two variables the i-th run uses ``(Ls[i], Ms[i])``.
    """
    key, methods, Ls, Ms = validate_request(example, variant, method, Ls, Ms)
    setup = EXAMPLES[key]
    options = options or RunOptions()
    settings = {
        "example": example,
        "variant": variant,
        "L": list(Ls),
        "M": None if Ms is None else list(Ms),
        "J": options.J,
        "cweno": {"d": list(options.params.d), "p": options.params.p, "q": options.params.q},
        "distributions": [
            {"kind": d.kind, "params": list(d.params), "span": list(d.grid_span)} for d in setup.dists
        ],
    }
    report = ExperimentReport(key, methods, settings)
    start = time.perf_counter()
    if setup.function is None:
        settings["samples"] = _samples(options, len(setup.dists))
        settings["solver"] = {
            "cells": options.swe.cells, "cfl": options.swe.cfl, "theta": options.swe.theta,
            "final_time": options.swe.final_time, "g": options.swe.g,
            "domain": [options.swe.x_lo, options.swe.x_hi],
        }
        settings["x_points"] = list(setup.x_points)
        if len(setup.dists) == 1:
            _run_example6(report, setup, methods, Ls, options)
        else:
            _run_example7(report, setup, methods, Ls, Ms, options)
    else:
        report.checks["reference_self_check"] = verify_reference_constants()
        settings["function"] = setup.function
        settings["samples"] = _samples(options, len(setup.dists))
        if len(setup.dists) == 1:
            settings["simpson_subintervals"] = options.simpson_subintervals
            _run_analytic_1d(report, setup, methods, Ls, options)
        else:
            _run_analytic_2d(report, setup, methods, Ls, Ms, options)
        _fit_rows(report, methods)
    report.timings["total"] = time.perf_counter() - start
    log.debug("example %s finished in %.1f s", key, report.timings["total"])
    return report


def _samples(options: RunOptions, ndim: int):
    return options.samples_1d if ndim == 1 else list(options.samples_2d)


def _fit_rows(report: ExperimentReport, methods) -> None:
    for m in methods:
        rows = [r for r in report.rows if r["method"] == m]
        Ls = [r["L"] for r in rows]
        fits = {}
        for metric in ("l1_U", "err_mu", "err_sigma", "l1_pdf"):
            errors = [r.get(metric) for r in rows]
            if any(e is None for e in errors):
                continue
            try:
                f = power_law_fit(Ls, errors)
            except InsufficientDataError as exc:
                fits[metric] = {"error": str(exc)}
                continue
            fits[metric] = {
                "amplitude": f.amplitude,
                "exponent": f.exponent,
                "residual": f.residual,
                "n_points": f.n_points,
                "used_L": [Ls[i] for i in f.used],
            }
        report.fits[m] = fits


# {{{ closed-form examples


def _overshoot(fn, sur, span, n) -> float:
    """Excursion of ``sur`` beyond the range of ``fn``, relative to that range."""
    x = np.linspace(span[0], span[1], n + 1)
    u, v = fn(x), sur(x)
    lo, hi = float(u.min()), float(u.max())
    return max(0.0, float(v.max()) - hi, lo - float(v.min())) / (hi - lo)


def _run_analytic_1d(report, setup, methods, Ls, options) -> None:
    fn = FUNCTIONS[setup.function]
    (dist,) = setup.dists
    ref = reference_moments(fn, dist)
    report.checks["reference"] = {"mean": ref.mean, "std": ref.std}
    span = dist.grid_span
    for L in Ls:
        group = {}
        for m in methods:
            t0 = time.perf_counter()
            if m == "cweno7":
                grid = uniform_grid(span, L)
                sur = build_surrogate(grid, fn(grid.nodes), options.params)
                mom = cweno_moments(sur, dist, options.J)
            else:
                sur = fit_gpc(dist, fn, L)
                mom = gpc_moments(sur)
            pdf = pdf_from_surrogate(sur, dist, options.samples_1d)
            ref_pdf = pdf_from_surrogate(fn, dist, options.samples_1d, edges=pdf.bin_edges)
            group[m], group[f"reference/{m}"] = pdf, ref_pdf
            report.rows.append({
                "L": L,
                "method": m,
                "mu": float(mom.mean),
                "sigma": float(mom.std),
                "ref_mu": ref.mean,
                "ref_sigma": ref.std,
                "err_mu": abs(float(mom.mean) - ref.mean),
                "err_sigma": abs(float(mom.std) - ref.std),
                "l1_U": l1_distance_simpson(fn, sur, span, options.simpson_subintervals),
                "l1_pdf": pdf_l1_error(pdf, ref_pdf),
                "overshoot": _overshoot(fn, sur, span, options.simpson_subintervals),
            })
            report.timings[f"{m}/L={L}"] = time.perf_counter() - t0
        report.pdfs[f"L={L}"] = group


def _run_analytic_2d(report, setup, methods, Ls, Ms, options) -> None:
    fn = FUNCTIONS[setup.function]
    dists = setup.dists
    ref = reference_moments(fn, dists)
    report.checks["reference"] = {"mean": ref.mean, "std": ref.std}

    def reference_block(x, y):
        return fn(x[:, None], y[None, :])

    separable = setup.function == "eq33"
    gaps = {}
    for L, M in zip(Ls, Ms):
        group = {}
        for m in methods:
            t0 = time.perf_counter()
            if m == "cweno7":
                grids = (uniform_grid(dists[0].grid_span, L), uniform_grid(dists[1].grid_span, M))
                samples = reference_block(grids[0].nodes, grids[1].nodes)
                sur = CwenoSurrogate2D(grids[0], grids[1], samples, options.params)
                mom = moments_2d(samples, grids, dists, options.J, options.params)
                if separable:
                    gaps[f"L={L},M={M}"] = _separable_gap(grids, dists, mom, options)
            else:
                sur = fit_gpc_2d(dists, fn, L, M)
                mom = gpc_moments(sur)
            pdf = pdf_from_surrogate(sur.eval_grid, dists, options.samples_2d)
            ref_pdf = pdf_from_surrogate(reference_block, dists, options.samples_2d, edges=pdf.bin_edges)
            group[m], group[f"reference/{m}"] = pdf, ref_pdf
            report.rows.append({
                "L": L,
                "M": M,
                "method": m,
                "mu": float(mom.mean),
                "sigma": float(mom.std),
                "ref_mu": ref.mean,
                "ref_sigma": ref.std,
                "err_mu": abs(float(mom.mean) - ref.mean),
                "err_sigma": abs(float(mom.std) - ref.std),
                "l1_pdf": pdf_l1_error(pdf, ref_pdf),
            })
            report.timings[f"{m}/L={L},M={M}"] = time.perf_counter() - t0
        report.pdfs[f"L={L},M={M}"] = group
    if gaps:
        report.checks["separable_mean_gap"] = gaps


def _separable_gap(grids, dists, mom, options) -> float:
    """|2-D mean - product of the 1-D CWENO7 means of the two factors|."""
    means = []
    for grid, dist, f in zip(grids, dists, (_eq31, lambda e: np.cos(np.pi * e))):
        sur = build_surrogate(grid, f(grid.nodes), options.params)
        means.append(float(cweno_moments(sur, dist, options.J).mean))
    return abs(float(mom.mean) - means[0] * means[1])


# }}}


# {{{ shallow-water examples


def _nearest_cells(x: np.ndarray, points) -> dict[float, int]:
    return {p: int(np.argmin(np.abs(x - p))) for p in points}


def _collocation_nodes(method: str, dist: DistributionSpec, L: int):
    if method == "cweno7":
        grid = uniform_grid(dist.grid_span, L)
        return grid.nodes, grid
    rule = collocation_rule(dist, L)
    return rule.mapped(dist)[0], rule


def _swe_surrogate_1d(method, dist, L, samples, options):
    """Batched surrogate and moments from ``samples[cell, l]``."""
    if method == "cweno7":
        grid = uniform_grid(dist.grid_span, L)
        sur = build_surrogate(grid, samples, options.params)
        return sur, cweno_moments(sur, dist, options.J)
    rule = collocation_rule(dist, L)
    sur = project_coefficients(build_basis(dist, L - 1), samples, rule)
    return sur, gpc_moments(sur)


def _relative_l1(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sum(np.abs(a - b)) / np.sum(np.abs(b)))


def _mean_agreement(report, Ls, Ms=None) -> None:
    agree = {}
    for i, L in enumerate(Ls):
        tag = f"L={L}" if Ms is None else f"L={L},M={Ms[i]}"
        c, g = report.fields.get(f"cweno7/{tag}"), report.fields.get(f"gpc/{tag}")
        if c is not None and g is not None:
            agree[tag] = _relative_l1(g["mean"], c["mean"])
    if agree:
        report.checks["mean_relative_l1"] = agree


def _run_example6(report, setup, methods, Ls, options) -> None:
    (dist,) = setup.dists
    config = options.swe
    report.x = config.centers
    cells = _nearest_cells(report.x, setup.x_points)
    report.checks["x_cells"] = {str(p): {"index": j, "x": report.x[j]} for p, j in cells.items()}
    xi = np.linspace(*dist.grid_span, options.slice_points)
    tv = {}
    for L in Ls:
        for m in methods:
            t0 = time.perf_counter()
            nodes, _ = _collocation_nodes(m, dist, L)
            state = run_batch(
                config,
                [lambda x, v=v: example6_topography(x, v) for v in nodes],
                [dam_break_initial] * L,
            )
            report.timings[f"solver/{m}/L={L}"] = time.perf_counter() - t0
            sur, mom = _swe_surrogate_1d(m, dist, L, state.w.T, options)
            tag = f"{m}/L={L}"
            report.fields[tag] = {"mean": mom.mean, "std": mom.std}
            for p, j in cells.items():
                member = sur.member(j)
                report.slices.setdefault(f"x={p}", {"xi": xi})[tag] = member(xi)
                pdf = pdf_from_surrogate(member, dist, options.samples_1d)
                report.pdfs.setdefault(f"L={L},x={p}", {})[m] = pdf
                tv.setdefault(f"x={p}", {})[tag] = pdf.total_variation()
            report.timings[tag] = time.perf_counter() - t0
    report.checks["total_variation"] = tv
    _mean_agreement(report, Ls)


def _run_example7(report, setup, methods, Ls, Ms, options) -> None:
    dx, dy = setup.dists
    config = options.swe
    report.x = config.centers
    cells = _nearest_cells(report.x, setup.x_points)
    report.checks["x_cells"] = {str(p): {"index": j, "x": report.x[j]} for p, j in cells.items()}
    tv = {}
    for L, M in zip(Ls, Ms):
        for m in methods:
            t0 = time.perf_counter()
            xs, gx = _collocation_nodes(m, dx, L)
            ys, gy = _collocation_nodes(m, dy, M)
            topo, init = [], []
            for a in xs:
                for b in ys:
                    topo.append(lambda x, a=a: example6_topography(x, a))
                    init.append(lambda x, b=b: dam_break_initial(x, SPLIT * b))
            state = run_batch(config, topo, init)
            report.timings[f"solver/{m}/L={L},M={M}"] = time.perf_counter() - t0
            samples = np.moveaxis(state.w.reshape(L, M, -1), -1, 0)
            if m == "cweno7":
                mom = moments_2d(samples, (gx, gy), setup.dists, options.J, options.params)
                member = lambda j: CwenoSurrogate2D(gx, gy, samples[j], options.params)
            else:
                bases = (build_basis(dx, L - 1), build_basis(dy, M - 1))
                sur = build_tensor_surrogate(samples, (gx, gy), bases)
                mom = gpc_moments(sur)
                member = sur.member
            tag = f"{m}/L={L},M={M}"
            report.fields[tag] = {"mean": mom.mean, "std": mom.std}
            for p, j in cells.items():
                pdf = pdf_from_surrogate(member(j).eval_grid, setup.dists, options.samples_2d)
                report.pdfs.setdefault(f"L={L},M={M},x={p}", {})[m] = pdf
                tv.setdefault(f"x={p}", {})[tag] = pdf.total_variation()
            report.timings[tag] = time.perf_counter() - t0
    report.checks["total_variation"] = tv
    _mean_agreement(report, Ls, Ms)


# }}}
