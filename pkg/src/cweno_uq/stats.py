"""Moments, histogram PDFs, L1 metrics and power-law convergence fits.

PDFs are estimated from a deterministic equispaced sample of the random
space in which every evaluation carries its probability mass
(density x spacing). Bin edges follow the ``auto`` rule: the larger of the
Sturges and Freedman-Diaconis bin counts, both computed on the weighted
sample.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from cweno_uq.cweno import CwenoParameters, CwenoSurrogate1D, CwenoSurrogate2D, DEFAULT_PARAMETERS
from cweno_uq.random_space import CollocationGrid1D, DistributionSpec, gauss_legendre

__all__ = [
    "MomentEstimate",
    "PdfEstimate",
    "PowerLawFit",
    "InsufficientDataError",
    "DisjointSupportWarning",
    "cell_gauss_nodes",
    "cweno_moments",
    "mean_2d",
    "moments_2d",
    "sample_points",
    "auto_bin_edges",
    "pdf_from_surrogate",
    "l1_distance_simpson",
    "pdf_l1_error",
    "power_law_fit",
    "SATURATION_LEVEL",
]

#: errors at or below this level are treated as round-off saturated
SATURATION_LEVEL = 1e-13

#: sample count up to which bin edges use exact weighted quantiles
EXACT_QUANTILE_LIMIT = 2**25

_CHUNK = 2**21


class InsufficientDataError(ValueError):
    pass


class DisjointSupportWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MomentEstimate:
    mean: float | np.ndarray
    std: float | np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.std) < 0):
            raise ValueError("standard deviation must be non-negative")


@dataclass(frozen=True)
class PdfEstimate:
    bin_edges: np.ndarray
    densities: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        e = np.asarray(self.bin_edges, dtype=float)
        d = np.asarray(self.densities, dtype=float)
        if e.ndim != 1 or e.size != d.size + 1 or np.any(np.diff(e) <= 0):
            raise ValueError("bin edges must be strictly increasing, one more than densities")
        object.__setattr__(self, "bin_edges", e)
        object.__setattr__(self, "densities", d)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def mass(self) -> float:
        return float(np.sum(self.densities * self.widths))

    def total_variation(self) -> float:
        """Total variation of the density, counting the drops to zero at both ends."""
        d = np.concatenate([[0.0], self.densities, [0.0]])
        return float(np.sum(np.abs(np.diff(d))))


@dataclass(frozen=True)
class PowerLawFit:
    """``error ~ amplitude * L**(-exponent)``; ``residual`` is the RMS log10 misfit."""

    amplitude: float
    exponent: float
    residual: float
    n_points: int
    used: tuple[int, ...] = field(default=())


# {{{ moments


def cell_gauss_nodes(grid: CollocationGrid1D, J: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """J Gauss-Legendre nodes and weights per cell, shape ``(L, J)`` each.

    The first and last cells are the half cells ``[xi_1, xi_{3/2}]`` and
    ``[xi_{L-1/2}, xi_L]``.
    """
    if J < 1:
        raise ValueError(f"J must be >= 1, got {J}")
    rule = gauss_legendre(J)
    x = grid.nodes
    h = 0.5 * grid.spacing
    lo = np.concatenate([[x[0]], x[1:] - h])
    hi = np.concatenate([x[:-1] + h, [x[-1]]])
    half = 0.5 * (hi - lo)
    nodes = 0.5 * (hi + lo)[:, None] + half[:, None] * rule.nodes
    weights = half[:, None] * rule.weights
    return nodes, weights


def _check_span(grid: CollocationGrid1D, dist: DistributionSpec) -> None:
    lo, hi = dist.grid_span
    tol = 1e-12 * (hi - lo)
    if grid.span[0] < lo - tol or grid.span[1] > hi + tol:
        raise ValueError(f"grid span {grid.span} leaves the distribution span {dist.grid_span}")


def cweno_moments(surrogate: CwenoSurrogate1D, dist: DistributionSpec, J: int = 4) -> MomentEstimate:
    """Mean and standard deviation by per-cell J-point Gauss quadrature of ``R_l * p``."""
    grid = surrogate.grid
    _check_span(grid, dist)
    nodes, gamma = cell_gauss_nodes(grid, J)
    s = (nodes - grid.nodes[:, None]) / grid.spacing
    values = surrogate.eval_local(s)
    w = gamma * dist.pdf(nodes)
    mean = np.einsum("...lj,lj->...", values, w)
    dev = values - mean[..., None, None]
    var = np.einsum("...lj,lj->...", dev * dev, w)
    return MomentEstimate(mean, np.sqrt(var))


def _quadrature_2d(grids, dists, J):
    (gx, gy), (dx, dy) = grids, dists
    _check_span(gx, dx)
    _check_span(gy, dy)
    x, wx = cell_gauss_nodes(gx, J)
    y, wy = cell_gauss_nodes(gy, J)
    x, y = x.ravel(), y.ravel()
    return x, y, wx.ravel() * dx.pdf(x), wy.ravel() * dy.pdf(y)


def moments_2d(
    samples, grids, dists, J: int = 4, params: CwenoParameters = DEFAULT_PARAMETERS
) -> MomentEstimate:
    """Dimension-by-dimension CWENO7 moments of ``samples[..., l, m]``.

    The sample table is interpolated along ``xi`` to the per-cell Gauss
    nodes, then along ``eta``, and the tensor Gauss rule is applied.
    """
    sur = CwenoSurrogate2D(grids[0], grids[1], samples, params)
    x, y, wx, wy = _quadrature_2d(grids, dists, J)
    values = sur.eval_grid(x, y)
    mean = np.einsum("...ij,i,j->...", values, wx, wy)
    dev = values - mean[..., None, None]
    var = np.einsum("...ij,i,j->...", dev * dev, wx, wy)
    return MomentEstimate(mean, np.sqrt(var))


def mean_2d(samples, grids, dists, J: int = 4, params: CwenoParameters = DEFAULT_PARAMETERS):
    return moments_2d(samples, grids, dists, J, params).mean


# }}}


# {{{ pdf estimation


def sample_points(dist: DistributionSpec, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoints of ``n`` equal subintervals of the span and their probability masses."""
    lo, hi = dist.grid_span
    h = (hi - lo) / n
    x = lo + h * (np.arange(n) + 0.5)
    return x, dist.pdf(x) * h


def _weighted_quantiles(values: np.ndarray, weights: np.ndarray, qs) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    cw = np.cumsum(weights[order])
    idx = np.searchsorted(cw, np.asarray(qs) * cw[-1])
    return values[order][np.minimum(idx, values.size - 1)]


def auto_bin_edges(values, weights, n: int | None = None) -> tuple[np.ndarray, bool]:
    """``max(Sturges, Freedman-Diaconis)`` equal-width edges on the weighted sample.

    ``n`` is the sample count entering both rules (defaults to
    ``values.size``). Returns ``(edges, degenerate)``; a constant sample
    yields the single bin ``[v - 1/2, v + 1/2]``.
    """
    values = np.ravel(values)
    weights = np.ravel(weights)
    n = values.size if n is None else n
    lo, hi = float(values.min()), float(values.max())
    return _auto_edges(lo, hi, values, weights, n)


def _auto_edges(lo, hi, values, weights, n) -> tuple[np.ndarray, bool]:
    if hi - lo <= 1e-14 * max(1.0, abs(lo), abs(hi)):
        return np.array([lo - 0.5, lo + 0.5]), True
    sturges = math.ceil(math.log2(n)) + 1
    q25, q75 = _weighted_quantiles(values, weights, [0.25, 0.75])
    width = 2.0 * (q75 - q25) * n ** (-1.0 / 3.0)
    fd = math.ceil((hi - lo) / width) if width > 0 else 1
    return np.linspace(lo, hi, max(sturges, fd) + 1), False


def _extend_edges(edges: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Add bins of the boundary widths until ``[lo, hi]`` is covered."""
    edges = np.asarray(edges, dtype=float)
    left = right = np.empty(0)
    if lo < edges[0]:
        w = edges[1] - edges[0]
        k = math.ceil((edges[0] - lo) / w)
        left = edges[0] - w * np.arange(k, 0, -1)
    if hi > edges[-1]:
        w = edges[-1] - edges[-2]
        k = math.ceil((hi - edges[-1]) / w)
        right = edges[-1] + w * np.arange(1, k + 1)
    return np.concatenate([left, edges, right])


def _bin_masses(values, weights, edges) -> np.ndarray:
    """Weighted bin counts; closed last bin as in ``numpy.histogram``."""
    nb = edges.size - 1
    widths = np.diff(edges)
    if np.allclose(widths, widths[0], rtol=1e-12, atol=0.0):
        idx = np.floor((values - edges[0]) / widths[0]).astype(np.intp)
        np.clip(idx, 0, nb - 1, out=idx)
        # round-off near an edge: compare against the edges themselves
        idx[values < edges[idx]] -= 1
        idx[(values >= edges[idx + 1]) & (idx < nb - 1)] += 1
        keep = (values >= edges[0]) & (values <= edges[-1])
        return np.bincount(idx[keep], weights=weights[keep], minlength=nb)
    return np.histogram(values, bins=edges, weights=weights)[0]


Evaluator = Callable[..., np.ndarray]


def _blocks(evaluate: Evaluator, dists: Sequence[DistributionSpec], n) -> Iterator:
    """Yield ``(values, weights)`` chunks covering the deterministic sample."""
    if len(dists) == 1:
        x, w = sample_points(dists[0], n[0])
        for i in range(0, x.size, _CHUNK):
            yield np.asarray(evaluate(x[i : i + _CHUNK]), dtype=float), w[i : i + _CHUNK]
    else:
        x, wx = sample_points(dists[0], n[0])
        y, wy = sample_points(dists[1], n[1])
        rows = max(1, _CHUNK // y.size)
        for i in range(0, x.size, rows):
            v = np.asarray(evaluate(x[i : i + rows], y), dtype=float)
            yield v, np.multiply.outer(wx[i : i + rows], wy)


def _sample_shape(dists, n_samples) -> tuple[int, ...]:
    if len(dists) not in (1, 2):
        raise ValueError("only one or two random dimensions are supported")
    if np.ndim(n_samples) == 0:
        n_samples = int(n_samples)
        if len(dists) == 1:
            shape = (n_samples,)
        else:
            side = int(round(math.sqrt(n_samples)))
            shape = (side, side)
    else:
        shape = tuple(int(k) for k in n_samples)
    if len(shape) != len(dists):
        raise ValueError("one sample count per random dimension is required")
    if math.prod(shape) < 1000:
        raise ValueError("PDF estimation needs at least 10^3 samples")
    return shape


def pdf_from_surrogate(
    evaluate: Evaluator,
    dists: DistributionSpec | Sequence[DistributionSpec],
    n_samples: int | Sequence[int],
    edges=None,
) -> PdfEstimate:
    """Mass-weighted histogram of ``evaluate`` over the random space.

    For one dimension ``evaluate(xi)`` maps an array of points to values;
    for two, ``evaluate(xi, eta)`` returns the tensor block
    ``len(xi) x len(eta)``. An integer ``n_samples`` is the total sample
    count (split evenly between two dimensions).

    With ``edges`` given, those bins are used, extended by bins of the
    boundary widths if the values reach beyond them; otherwise the auto
    rule picks the edges.
    """
    if isinstance(dists, DistributionSpec):
        dists = (dists,)
    shape = _sample_shape(dists, n_samples)
    total = math.prod(shape)

    # pass 1: range and the quantile sample
    keep = total <= EXACT_QUANTILE_LIMIT
    stride = 1 if keep else math.ceil(math.sqrt(total / EXACT_QUANTILE_LIMIT))
    lo, hi = math.inf, -math.inf
    kept, qv, qw = [], [], []
    for v, w in _blocks(evaluate, dists, shape):
        if not np.all(np.isfinite(v)):
            raise ValueError("surrogate produced non-finite values")
        lo, hi = min(lo, float(v.min())), max(hi, float(v.max()))
        if keep:
            kept.append((v, w))
        elif edges is None:
            sl = (slice(None, None, stride),) * v.ndim
            qv.append(v[sl].ravel())
            qw.append(w[sl].ravel())

    degenerate = False
    if edges is None:
        if keep:
            qv = [v.ravel() for v, _ in kept]
            qw = [w.ravel() for _, w in kept]
        edges, degenerate = _auto_edges(lo, hi, np.concatenate(qv), np.concatenate(qw), total)
        del qv, qw
    else:
        edges = _extend_edges(edges, lo, hi)

    # pass 2: accumulate bin masses
    mass = np.zeros(edges.size - 1)
    for v, w in kept if keep else _blocks(evaluate, dists, shape):
        mass += _bin_masses(v.ravel(), w.ravel(), edges)
    densities = mass / (mass.sum() * np.diff(edges))
    return PdfEstimate(edges, densities, degenerate)


# }}}


# {{{ metrics


def l1_distance_simpson(f, g, interval: tuple[float, float], n_sub: int = 20000) -> float:
    """Composite Simpson estimate of ``int |f - g|`` with ``n_sub`` subintervals."""
    if n_sub < 2 or n_sub % 2:
        raise ValueError(f"Simpson's rule needs an even number of subintervals, got {n_sub}")
    a, b = interval
    x = np.linspace(a, b, n_sub + 1)
    y = np.abs(np.asarray(f(x), dtype=float) - np.asarray(g(x), dtype=float))
    h = (b - a) / n_sub
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def _density_on(pdf: PdfEstimate, mids: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(pdf.bin_edges, mids, side="right") - 1
    inside = (idx >= 0) & (idx < pdf.densities.size)
    out = np.zeros_like(mids)
    out[inside] = pdf.densities[idx[inside]]
    return out


def pdf_l1_error(p: PdfEstimate, q: PdfEstimate) -> float:
    """L1 distance of two histogram densities after rebinning on the union of edges."""
    edges = np.union1d(p.bin_edges, q.bin_edges)
    mids = 0.5 * (edges[1:] + edges[:-1])
    dp, dq = _density_on(p, mids), _density_on(q, mids)
    widths = np.diff(edges)
    if not np.any((dp > 0) & (dq > 0)):
        warnings.warn("PDF estimates have disjoint supports", DisjointSupportWarning, stacklevel=2)
        return 2.0
    return float(np.sum(np.abs(dp - dq) * widths))


def power_law_fit(Ls, errors, saturation: float = SATURATION_LEVEL) -> PowerLawFit:
    """Least-squares line through ``(log L, log error)``; ``exponent`` is minus the slope.

    Errors at or below ``saturation`` are dropped before fitting.
    """
    Ls = np.asarray(Ls, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if Ls.shape != errors.shape:
        raise ValueError("Ls and errors must have the same length")
    used = np.flatnonzero(np.isfinite(errors) & (errors > saturation))
    if used.size < 2:
        raise InsufficientDataError(
            f"power-law fit needs >= 2 unsaturated points, got {used.size}"
        )
    x = np.log(Ls[used])
    y = np.log(errors[used])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid**2)) / np.log(10.0))
    return PowerLawFit(float(np.exp(intercept)), float(-slope), rms, int(used.size), tuple(int(i) for i in used))


# }}}
