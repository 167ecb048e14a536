"""Input distributions, collocation grids and Gauss quadrature rules.

Gauss rules are computed with the Golub-Welsch construction: the nodes are
the eigenvalues of the symmetric tridiagonal Jacobi matrix of the
orthonormal three-term recurrence. Nodes are then polished with Newton
steps and the weights are taken from the Christoffel function, which keeps
every weight accurate to a few ulps in relative terms (the eigenvector
formula loses relative accuracy on the tiny Hermite tail weights).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "DistributionSpec",
    "CollocationGrid1D",
    "QuadratureRule",
    "uniform",
    "normal",
    "gauss_legendre",
    "gauss_hermite_normal",
    "uniform_grid",
    "pdf_eval",
    "recurrence_coefficients",
    "collocation_rule",
    "MIN_NODES",
]

#: a CWENO7 stencil spans seven nodes
MIN_NODES = 7


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# {{{ distributions


@dataclass(frozen=True)
class DistributionSpec:
    """A uniform or normal input distribution.

    ``params`` is ``(a, b)`` for ``kind="uniform"`` and ``(mean, stddev)``
    for ``kind="normal"``. ``grid_span`` is the finite interval on which
    collocation nodes and deterministic samples are placed.
    """

    kind: str
    params: tuple[float, float]
    grid_span: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.grid_span
        if self.kind == "uniform":
            a, b = self.params
            if not a < b:
                raise ValueError(f"uniform distribution needs a < b, got {self.params}")
            if (lo, hi) != (a, b):
                raise ValueError("uniform grid_span must equal the support [a, b]")
        elif self.kind == "normal":
            mean, std = self.params
            if not std > 0:
                raise ValueError(f"normal distribution needs stddev > 0, got {std}")
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError("normal grid_span must be a finite interval")
            if not math.isclose(lo + hi, 2 * mean, abs_tol=1e-12 * (hi - lo)):
                raise ValueError("normal grid_span must be symmetric about the mean")
        else:
            raise ValueError(f"unsupported distribution kind: {self.kind!r}")

    @property
    def center(self) -> float:
        if self.kind == "uniform":
            return 0.5 * (self.params[0] + self.params[1])
        return self.params[0]

    @property
    def scale(self) -> float:
        """Half-width (uniform) or standard deviation (normal)."""
        if self.kind == "uniform":
            return 0.5 * (self.params[1] - self.params[0])
        return self.params[1]

    def to_standard(self, x):
        """Map to the reference variable on [-1, 1] or of N(0, 1)."""
        return (np.asarray(x, dtype=float) - self.center) / self.scale

    def from_standard(self, z):
        return self.center + self.scale * np.asarray(z, dtype=float)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "uniform":
            a, b = self.params
            inside = (x >= a) & (x <= b)
            return np.where(inside, 1.0 / (b - a), 0.0)
        mean, std = self.params
        z = (x - mean) / std
        return np.exp(-0.5 * z * z) / (std * math.sqrt(2.0 * math.pi))


def uniform(a: float = -1.0, b: float = 1.0) -> DistributionSpec:
    return DistributionSpec("uniform", (float(a), float(b)), (float(a), float(b)))


def normal(mean: float = 0.0, stddev: float = 1.0, n_sigma: float = 6.0) -> DistributionSpec:
    """Normal distribution whose collocation span is ``mean +- n_sigma * stddev``."""
    half = n_sigma * stddev
    return DistributionSpec(
        "normal", (float(mean), float(stddev)), (mean - half, mean + half)
    )


def pdf_eval(spec: DistributionSpec, xi):
    """Density of ``spec`` at ``xi`` (zero outside a uniform support)."""
    out = spec.pdf(xi)
    return float(out) if np.ndim(out) == 0 else out


# }}}


# {{{ collocation grids


@dataclass(frozen=True)
class CollocationGrid1D:
    nodes: np.ndarray
    spacing: float

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < MIN_NODES:
            raise ValueError(f"a collocation grid needs at least {MIN_NODES} nodes")
        steps = np.diff(nodes)
        if np.any(steps <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if np.max(np.abs(steps - self.spacing)) > 1e-12 * abs(self.spacing) * 8:
            raise ValueError("grid nodes must be equispaced")

    def __len__(self) -> int:
        return self.nodes.size

    @property
    def span(self) -> tuple[float, float]:
        return float(self.nodes[0]), float(self.nodes[-1])


def uniform_grid(span: tuple[float, float], L: int) -> CollocationGrid1D:
    """``L`` equispaced nodes on ``span``, endpoints included."""
    lo, hi = map(float, span)
    if L < MIN_NODES:
        raise ValueError(f"uniform_grid needs L >= {MIN_NODES}, got {L}")
    if not hi > lo:
        raise ValueError(f"empty span {span}")
    spacing = (hi - lo) / (L - 1)
    nodes = lo + spacing * np.arange(L)
    nodes[-1] = hi
    return CollocationGrid1D(nodes, spacing)


# }}}


# {{{ gauss quadrature


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for ``measure`` in {"legendre", "normal"}.

    "legendre" integrates against the unit weight on [-1, 1] (weights sum
    to 2); "normal" integrates against the standard normal density
    (weights sum to 1).
    """

    nodes: np.ndarray
    weights: np.ndarray
    measure: str = field(default="legendre")

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "weights", _frozen(self.weights))

    def __len__(self) -> int:
        return self.nodes.size

    def mapped(self, dist: DistributionSpec) -> tuple[np.ndarray, np.ndarray]:
        """Nodes in the physical variable of ``dist`` and probability weights.

        The returned weights absorb the density, so that
        ``sum(w * f(x))`` approximates the expectation of ``f``.
        """
        expected = "legendre" if dist.kind == "uniform" else "normal"
        if self.measure != expected:
            raise ValueError(f"a {self.measure} rule cannot integrate a {dist.kind} density")
        w = self.weights / self.weights.sum()
        return dist.from_standard(self.nodes), w


def recurrence_coefficients(measure: str, n: int) -> np.ndarray:
    """Off-diagonal Jacobi entries ``b_1..b_n`` of the orthonormal recurrence.

    Both families are symmetric, so the diagonal vanishes and
    ``b_{k+1} phi_{k+1} = x phi_k - b_k phi_{k-1}``.
    """
    k = np.arange(1, n + 1, dtype=float)
    if measure == "legendre":
        return k / np.sqrt(4.0 * k * k - 1.0)
    if measure == "normal":
        return np.sqrt(k)
    raise ValueError(f"unknown measure {measure!r}")


def _orthonormal_values(x: np.ndarray, b: np.ndarray, n: int, mass: float):
    """phi_0..phi_n and phi_n' at ``x`` for a symmetric Jacobi recurrence."""
    phi = np.empty((n + 1,) + x.shape)
    dphi = np.empty_like(phi)
    phi[0] = 1.0 / math.sqrt(mass)
    dphi[0] = 0.0
    if n >= 1:
        phi[1] = x * phi[0] / b[0]
        dphi[1] = phi[0] / b[0]
    for k in range(1, n):
        phi[k + 1] = (x * phi[k] - b[k - 1] * phi[k - 1]) / b[k]
        dphi[k + 1] = (phi[k] + x * dphi[k] - b[k - 1] * dphi[k - 1]) / b[k]
    return phi, dphi


def _gauss(measure: str, n: int, mass: float) -> QuadratureRule:
    if n < 1:
        raise ValueError(f"quadrature size must be >= 1, got {n}")
    b = recurrence_coefficients(measure, n)
    if n == 1:
        x = np.zeros(1)
    else:
        x = eigh_tridiagonal(np.zeros(n), b[: n - 1], eigvals_only=True)
        for _ in range(2):
            phi, dphi = _orthonormal_values(x, b, n, mass)
            x = x - phi[n] / dphi[n]
    phi, _ = _orthonormal_values(x, b, n - 1, mass)
    w = 1.0 / np.sum(phi * phi, axis=0)

    # enforce exact mirror symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    if n % 2:
        x[n // 2] = 0.0
    return QuadratureRule(x, w, measure)


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1], exact to degree 2n - 1."""
    return _gauss("legendre", n, 2.0)


def gauss_hermite_normal(n: int) -> QuadratureRule:
    """n-point Gauss rule for the standard normal density (probabilists')."""
    return _gauss("normal", n, 1.0)


def collocation_rule(dist: DistributionSpec, n: int) -> QuadratureRule:
    """The Gauss rule matched to ``dist``: Legendre (uniform) or Hermite (normal)."""
    if dist.kind == "uniform":
        return gauss_legendre(n)
    return gauss_hermite_normal(n)


# }}}
