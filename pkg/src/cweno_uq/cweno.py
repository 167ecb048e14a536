"""Seventh-order central WENO (CWENO7) interpolation on uniform grids.

Every polynomial is stored in the scaled local variable
``s = (xi - xi_l) / dxi`` of the node it belongs to, so the interpolation
matrices, smoothness-indicator quadratic forms and ghost extrapolation
weights are fixed rational numbers, computed once and exactly.

All routines accept a leading batch shape on the sample arrays: building
surrogates for many spatial points at once is a single vectorised call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from cweno_uq.random_space import MIN_NODES, CollocationGrid1D

__all__ = [
    "CwenoParameters",
    "PolynomialLocal",
    "CwenoCell",
    "CwenoSurrogate1D",
    "CwenoSurrogate2D",
    "OutOfDomainError",
    "fit_substencil_polynomials",
    "compute_p0",
    "combine_candidates",
    "smoothness_indicators",
    "nonlinear_weights",
    "ghost_extrapolate",
    "build_surrogate",
    "eval_surrogate",
]

DEGREE = 6
NCOEF = DEGREE + 1
STENCIL = np.arange(-3, 4)


class OutOfDomainError(ValueError):
    """Evaluation point outside the span of the collocation grid."""


# {{{ exact rational tables


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _lagrange_coefficients(nodes: list[int]) -> list[list[Fraction]]:
    """Monomial coefficients of each Lagrange basis polynomial over ``nodes``."""
    basis = []
    for i, si in enumerate(nodes):
        p = [Fraction(1)]
        for j, sj in enumerate(nodes):
            if j != i:
                p = _poly_mul(p, [Fraction(-sj, si - sj), Fraction(1, si - sj)])
        basis.append(p)
    return basis


def _lagrange_values(nodes: list[int], targets: list[int]) -> np.ndarray:
    """Matrix mapping values at ``nodes`` to interpolant values at ``targets``."""
    basis = _lagrange_coefficients(nodes)
    return np.array(
        [[float(sum(c * Fraction(t) ** k for k, c in enumerate(p))) for p in basis] for t in targets]
    )


@lru_cache(maxsize=None)
def _interpolation_tables() -> tuple[np.ndarray, np.ndarray]:
    """Stencil values -> local monomial coefficients.

    Returns ``opt`` of shape (7, 7) and ``sub`` of shape (4, 7, 7); both
    are applied as ``coefficients = table @ values``. Candidate ``k`` uses
    the stencil offsets ``k-4 .. k-1``.
    """
    opt = np.zeros((NCOEF, 7))
    for i, p in enumerate(_lagrange_coefficients(list(STENCIL))):
        opt[:, i] = [float(c) for c in p]

    sub = np.zeros((4, NCOEF, 7))
    for k in range(1, 5):
        nodes = list(range(k - 4, k))
        for j, p in enumerate(_lagrange_coefficients(nodes)):
            sub[k - 1, : len(p), k - 1 + j] = [float(c) for c in p]

    for a in (opt, sub):
        a.setflags(write=False)
    return opt, sub


def _monomial_integral(n: int, lo: Fraction, hi: Fraction) -> Fraction:
    return (hi ** (n + 1) - lo ** (n + 1)) / (n + 1)


@lru_cache(maxsize=None)
def _smoothness_form(lo: Fraction = Fraction(-1, 2), hi: Fraction = Fraction(1, 2)) -> np.ndarray:
    """Quadratic form ``B`` such that ``beta = c^T B c`` over ``s in [lo, hi]``.

    In the local variable the ``(dxi)^(2i-1)`` scaling cancels against the
    chain rule and the change of measure, leaving
    ``beta = sum_i int (d^i P / ds^i)^2 ds``.
    """
    B = [[Fraction(0)] * NCOEF for _ in range(NCOEF)]
    for i in range(1, DEGREE + 1):
        for j in range(i, NCOEF):
            for m in range(i, NCOEF):
                fj = Fraction(factorial(j), factorial(j - i))
                fm = Fraction(factorial(m), factorial(m - i))
                B[j][m] += fj * fm * _monomial_integral(j + m - 2 * i, lo, hi)
    out = np.array([[float(x) for x in row] for row in B])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _ghost_tables() -> tuple[np.ndarray, np.ndarray]:
    """Degree-6 extrapolation from the 7 boundary nodes to 3 ghosts per side."""
    nodes = list(range(7))
    left = _lagrange_values(nodes, [-3, -2, -1])
    right = _lagrange_values(nodes, [7, 8, 9])
    for a in (left, right):
        a.setflags(write=False)
    return left, right


# }}}


# {{{ parameters and polynomials


@dataclass(frozen=True)
class CwenoParameters:
    """Linear weights ``d``, power ``p`` and epsilon exponent ``q`` (eps = dxi**q)."""

    d: tuple[float, float, float, float, float] = (0.75, 0.0625, 0.0625, 0.0625, 0.0625)
    p: float = 2.0
    q: float = 3.0

    def __post_init__(self):
        d = tuple(float(x) for x in self.d)
        if len(d) != 5:
            raise ValueError("CWENO7 needs five linear weights")
        if any(not 0.0 < x < 1.0 for x in d) or abs(sum(d) - 1.0) > 1e-14:
            raise ValueError(f"linear weights must lie in (0, 1) and sum to 1, got {d}")
        object.__setattr__(self, "d", d)

    @property
    def linear_weights(self) -> np.ndarray:
        return np.array(self.d)


DEFAULT_PARAMETERS = CwenoParameters()


@dataclass(frozen=True)
class PolynomialLocal:
    """Polynomial ``sum_j coeffs[..., j] * s**j`` with ``s = (xi - center) / spacing``.

    ``coeffs`` may carry leading batch dimensions; the last axis always has
    length 7, padded with zeros above ``degree``.
    """

    coeffs: np.ndarray
    center: float = 0.0
    spacing: float = 1.0
    degree: int = DEGREE

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape[-1] < NCOEF:
            pad = [(0, 0)] * (c.ndim - 1) + [(0, NCOEF - c.shape[-1])]
            c = np.pad(c, pad)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_physical(cls, coeffs, center: float, spacing: float) -> "PolynomialLocal":
        """Re-expand ``sum a_j xi**j`` in the local variable around ``center``."""
        a = list(coeffs)
        local = np.zeros(NCOEF)
        for j, aj in enumerate(a):
            for k in range(j + 1):
                local[k] += aj * comb(j, k) * center ** (j - k) * spacing**k
        return cls(local, center, spacing, degree=len(a) - 1)

    def local(self, s):
        return _horner(self.coeffs, np.asarray(s, dtype=float))

    def __call__(self, xi):
        return self.local((np.asarray(xi, dtype=float) - self.center) / self.spacing)


def _horner(coeffs: np.ndarray, s: np.ndarray) -> np.ndarray:
    out = coeffs[..., -1] * np.ones_like(s)
    for k in range(coeffs.shape[-1] - 2, -1, -1):
        out = out * s + coeffs[..., k]
    return out


# }}}


# {{{ candidate polynomials and weights


def _check_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{what} must be finite")


def fit_substencil_polynomials(stencil_values, spacing: float = 1.0, center: float = 0.0):
    """Interpolate seven equispaced values with ``P_opt`` and the cubics ``P_1..P_4``.

    ``stencil_values[..., i]`` is the sample at ``center + (i - 3) * spacing``.
    Returns ``(P_opt, [P_1, P_2, P_3, P_4])``.
    """
    v = np.asarray(stencil_values, dtype=float)
    if v.shape[-1] != 7:
        raise ValueError("a CWENO7 stencil has exactly seven values")
    _check_finite(v, "stencil values")
    opt, sub = _interpolation_tables()
    p_opt = PolynomialLocal(v @ opt.T, center, spacing, DEGREE)
    cands = [PolynomialLocal(v @ sub[k].T, center, spacing, 3) for k in range(4)]
    return p_opt, cands


def compute_p0(p_opt: PolynomialLocal, cands, params: CwenoParameters = DEFAULT_PARAMETERS):
    """``P_0 = (P_opt - sum_k d_k P_k) / d_0``."""
    d = params.d
    acc = p_opt.coeffs.copy()
    for dk, pk in zip(d[1:], cands):
        acc -= dk * pk.coeffs
    return PolynomialLocal(acc / d[0], p_opt.center, p_opt.spacing, DEGREE)


def combine_candidates(polys, weights) -> PolynomialLocal:
    """``sum_k weights[..., k] * P_k`` for ``polys = [P_0, ..., P_4]``."""
    w = np.asarray(weights, dtype=float)
    coeffs = sum(w[..., k, None] * p.coeffs for k, p in enumerate(polys))
    return PolynomialLocal(coeffs, polys[0].center, polys[0].spacing, DEGREE)


def smoothness_indicators(polys, cell: tuple[float, float] | None = None) -> np.ndarray:
    """Jiang-Shu indicators of each polynomial over ``cell`` (physical bounds).

    The default cell is ``[center - spacing/2, center + spacing/2]``.
    Returns an array with the polynomial index on the last axis.
    """
    ref = polys[0]
    if cell is None:
        B = _smoothness_form()
    else:
        lo = Fraction((cell[0] - ref.center) / ref.spacing).limit_denominator(10**12)
        hi = Fraction((cell[1] - ref.center) / ref.spacing).limit_denominator(10**12)
        B = _smoothness_form(lo, hi)
    return np.stack([np.einsum("...i,ij,...j->...", p.coeffs, B, p.coeffs) for p in polys], axis=-1)


def nonlinear_weights(beta, spacing: float, params: CwenoParameters = DEFAULT_PARAMETERS):
    """CWENO-Z weights from the five indicators ``beta[..., 0..4]``.

    Returns ``(tau, omega)``.
    """
    beta = np.asarray(beta, dtype=float)
    eps = spacing**params.q
    tau = np.abs(-beta[..., 1] - 3.0 * beta[..., 2] + 3.0 * beta[..., 3] + beta[..., 4])
    alpha = params.linear_weights * (1.0 + (tau[..., None] / (eps + beta)) ** params.p)
    omega = alpha / alpha.sum(axis=-1, keepdims=True)
    return tau, omega


def _reconstruct(stencils: np.ndarray, spacing: float, params: CwenoParameters):
    """Vectorised CWENO7 on ``stencils[..., 7]``.

    Returns ``(coefficients, beta, tau, omega)`` with coefficients of
    shape ``(..., 7)`` in the local variable.
    """
    opt, sub = _interpolation_tables()
    d = params.linear_weights
    c_opt = stencils @ opt.T
    c_sub = np.einsum("...v,kcv->...kc", stencils, sub)
    c0 = (c_opt - np.einsum("k,...kc->...c", d[1:], c_sub)) / d[0]
    cands = np.concatenate([c0[..., None, :], c_sub], axis=-2)

    B = _smoothness_form()
    beta = np.einsum("...ki,ij,...kj->...k", cands, B, cands)
    beta = np.maximum(beta, 0.0)
    tau, omega = nonlinear_weights(beta, spacing, params)
    coeffs = np.einsum("...k,...kc->...c", omega, cands)
    return coeffs, beta, tau, omega


def ghost_extrapolate(edge_samples, side: str) -> np.ndarray:
    """Three ghost values from the degree-6 interpolant of seven edge samples.

    ``edge_samples`` are the first seven samples (``side="left"``) or the
    last seven (``side="right"``), in increasing node order. The ghosts are
    returned in increasing node order as well.
    """
    v = np.asarray(edge_samples, dtype=float)
    left, right = _ghost_tables()
    if side == "left":
        return v @ left.T
    if side == "right":
        return v @ right.T
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


# }}}


# {{{ surrogates


@dataclass(frozen=True)
class CwenoCell:
    center: float
    interval: tuple[float, float]
    polynomial: PolynomialLocal
    beta: np.ndarray
    tau: float | np.ndarray
    omega: np.ndarray


@dataclass(frozen=True)
class CwenoSurrogate1D:
    """Piecewise CWENO7 interpolant, one degree-6 polynomial per node.

    ``coefficients`` has shape ``batch + (L, 7)``. Cell ``l`` covers
    ``[xi_l - dxi/2, xi_l + dxi/2]`` clipped to the grid span, so the first
    and last cells are half cells.
    """

    grid: CollocationGrid1D
    coefficients: np.ndarray
    beta: np.ndarray
    tau: np.ndarray
    omega: np.ndarray
    params: CwenoParameters = field(default=DEFAULT_PARAMETERS)

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.coefficients.shape[:-2]

    @property
    def cell_bounds(self) -> np.ndarray:
        x = self.grid.nodes
        h = 0.5 * self.grid.spacing
        lo = np.maximum(x - h, x[0])
        hi = np.minimum(x + h, x[-1])
        lo[0], hi[-1] = x[0], x[-1]
        return np.stack([lo, hi], axis=-1)

    def member(self, index) -> "CwenoSurrogate1D":
        """The unbatched surrogate at ``index`` of the batch axes."""
        return CwenoSurrogate1D(
            self.grid, self.coefficients[index], self.beta[index],
            self.tau[index], self.omega[index], self.params,
        )

    def cell(self, i: int, batch_index: tuple[int, ...] = ()) -> CwenoCell:
        idx = tuple(batch_index) + (i,)
        lo, hi = self.cell_bounds[i]
        poly = PolynomialLocal(self.coefficients[idx], float(self.grid.nodes[i]), self.grid.spacing)
        return CwenoCell(
            float(self.grid.nodes[i]), (float(lo), float(hi)), poly,
            self.beta[idx], self.tau[idx], self.omega[idx],
        )

    @property
    def cells(self) -> list[CwenoCell]:
        if self.batch_shape:
            raise ValueError("cells is only defined for an unbatched surrogate")
        return [self.cell(i) for i in range(len(self.grid))]

    def locate(self, xi) -> tuple[np.ndarray, np.ndarray]:
        """Owning cell index and local coordinate; a shared interface belongs to the left cell."""
        xi = np.asarray(xi, dtype=float)
        x0, x1 = self.grid.span
        if np.any(xi < x0) or np.any(xi > x1) or not np.all(np.isfinite(xi)):
            raise OutOfDomainError(f"evaluation points must lie in [{x0}, {x1}]")
        t = (xi - x0) / self.grid.spacing
        idx = np.clip(np.ceil(t - 0.5), 0, len(self.grid) - 1).astype(np.intp)
        return idx, t - idx

    def __call__(self, xi):
        """Evaluate at ``xi``; output shape is ``batch_shape + xi.shape``."""
        idx, s = self.locate(xi)
        c = self.coefficients
        out = c[..., idx, NCOEF - 1]
        for k in range(NCOEF - 2, -1, -1):
            out = out * s + c[..., idx, k]
        return out

    def eval_local(self, s) -> np.ndarray:
        """Each cell's polynomial at local points ``s[L, P]``; shape ``batch + (L, P)``."""
        s = np.asarray(s, dtype=float)
        c = self.coefficients[..., :, None, :]
        out = c[..., NCOEF - 1] * np.ones_like(s)
        for k in range(NCOEF - 2, -1, -1):
            out = out * s + c[..., k]
        return out

    def interface_jumps(self) -> np.ndarray:
        """``|R_l(xi_{l+1/2}) - R_{l+1}(xi_{l+1/2})|`` for the L-1 interfaces."""
        c = self.coefficients
        right = _horner(c[..., :-1, :], np.array(0.5))
        left = _horner(c[..., 1:, :], np.array(-0.5))
        return np.abs(right - left)


def build_surrogate(
    grid: CollocationGrid1D,
    samples,
    params: CwenoParameters = DEFAULT_PARAMETERS,
    boundary: str = "ghost-extrapolation",
) -> CwenoSurrogate1D:
    """CWENO7 surrogate of ``samples[..., L]`` given at the nodes of ``grid``.

    Three ghost values per side, extrapolated with degree 6 from the
    nearest seven nodes, make every cell's stencil interior.
    """
    if boundary != "ghost-extrapolation":
        raise ValueError(f"unsupported boundary treatment {boundary!r}")
    u = np.asarray(samples, dtype=float)
    L = len(grid)
    if L < MIN_NODES:
        raise ValueError(f"CWENO7 needs at least {MIN_NODES} nodes, got {L}")
    if u.shape[-1] != L:
        raise ValueError(f"expected {L} samples on the last axis, got {u.shape[-1]}")
    _check_finite(u, "samples")

    ext = np.concatenate(
        [ghost_extrapolate(u[..., :7], "left"), u, ghost_extrapolate(u[..., -7:], "right")],
        axis=-1,
    )
    stencils = sliding_window_view(ext, 7, axis=-1)
    coeffs, beta, tau, omega = _reconstruct(stencils, grid.spacing, params)
    return CwenoSurrogate1D(grid, coeffs, beta, tau, omega, params)


def eval_surrogate(surrogate: CwenoSurrogate1D, xi):
    out = surrogate(xi)
    return float(out) if np.ndim(out) == 0 else out


class CwenoSurrogate2D:
    """Dimension-by-dimension CWENO7 interpolant on a Cartesian grid.

    ``samples[..., l, m]`` is the value at ``(xi_l, eta_m)``. Evaluation
    first interpolates in ``xi`` along every grid line ``eta = eta_m`` and
    then in ``eta`` through the intermediate values.
    """

    def __init__(self, grid_xi, grid_eta, samples, params: CwenoParameters = DEFAULT_PARAMETERS):
        u = np.asarray(samples, dtype=float)
        if u.shape[-2:] != (len(grid_xi), len(grid_eta)):
            raise ValueError(
                f"sample table has shape {u.shape[-2:]}, grids need "
                f"{(len(grid_xi), len(grid_eta))}"
            )
        self.grid_xi = grid_xi
        self.grid_eta = grid_eta
        self.params = params
        self.samples = u
        self._along_xi = build_surrogate(grid_xi, np.swapaxes(u, -1, -2), params)

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.samples.shape[:-2]

    def member(self, index) -> "CwenoSurrogate2D":
        return CwenoSurrogate2D(self.grid_xi, self.grid_eta, self.samples[index], self.params)

    def along_eta(self, xi) -> CwenoSurrogate1D:
        """Surrogates in ``eta`` through the ``xi``-interpolated grid lines."""
        mid = self._along_xi(np.asarray(xi, dtype=float))  # batch + (M, P)
        return build_surrogate(self.grid_eta, np.swapaxes(mid, -1, -2), self.params)

    def eval_grid(self, xi, eta) -> np.ndarray:
        """Values on the tensor grid ``xi x eta``; shape ``batch + (len(xi), len(eta))``."""
        return self.along_eta(np.ravel(xi))(np.ravel(eta))

    def __call__(self, xi, eta):
        xi, eta = np.broadcast_arrays(np.asarray(xi, float), np.asarray(eta, float))
        if self.batch_shape:
            raise ValueError("pointwise evaluation is only defined for an unbatched surrogate")
        sur = self.along_eta(xi.ravel())
        idx, s = sur.locate(eta.ravel())
        rows = np.arange(idx.size)
        c = sur.coefficients
        out = c[rows, idx, NCOEF - 1]
        for k in range(NCOEF - 2, -1, -1):
            out = out * s + c[rows, idx, k]
        return out.reshape(xi.shape)


# }}}
