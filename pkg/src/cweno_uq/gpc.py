"""Generalized polynomial chaos surrogates with quadrature-projected coefficients.

The orthonormal families (normalized Legendre for uniform inputs,
normalized probabilists' Hermite for normal inputs) are evaluated through
their three-term recurrence in the standardized variable; the monomial
table is available for inspection but never used for evaluation, since
monomial expansions of degree-40 Legendre polynomials lose about ten
digits to cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from cweno_uq.random_space import (
    DistributionSpec,
    QuadratureRule,
    collocation_rule,
    recurrence_coefficients,
)
from cweno_uq.stats import MomentEstimate

__all__ = [
    "OrthonormalBasis",
    "GpcSurrogate",
    "build_basis",
    "project_coefficients",
    "build_tensor_surrogate",
    "gpc_eval",
    "gpc_moments",
    "fit_gpc",
    "fit_gpc_2d",
]


@dataclass(frozen=True)
class OrthonormalBasis:
    dist: DistributionSpec
    degree: int

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"basis degree must be >= 0, got {self.degree}")
        if self.dist.kind not in ("uniform", "normal"):
            raise ValueError(f"no orthonormal family for {self.dist.kind!r}")

    @property
    def measure(self) -> str:
        return "legendre" if self.dist.kind == "uniform" else "normal"

    @property
    def size(self) -> int:
        return self.degree + 1

    def vandermonde(self, xi) -> np.ndarray:
        """``Phi_0..Phi_N`` at ``xi``; the basis index is the last axis."""
        z = self.dist.to_standard(xi)
        b = recurrence_coefficients(self.measure, max(self.degree, 1))
        phi = np.empty(z.shape + (self.size,))
        phi[..., 0] = 1.0
        if self.degree >= 1:
            phi[..., 1] = z / b[0]
        for k in range(1, self.degree):
            phi[..., k + 1] = (z * phi[..., k] - b[k - 1] * phi[..., k - 1]) / b[k]
        return phi

    @cached_property
    def monomial_table(self) -> np.ndarray:
        """``T[n, j]``: coefficient of ``z**j`` in ``Phi_n``, ``z`` the standardized input."""
        n = self.size
        b = recurrence_coefficients(self.measure, max(self.degree, 1))
        T = np.zeros((n, n))
        T[0, 0] = 1.0
        if n > 1:
            T[1, 1] = 1.0 / b[0]
        for k in range(1, n - 1):
            T[k + 1, 1:] = T[k, :-1]
            T[k + 1] -= b[k - 1] * T[k - 1]
            T[k + 1] /= b[k]
        return T


def build_basis(dist: DistributionSpec, degree: int) -> OrthonormalBasis:
    return OrthonormalBasis(dist, degree)


@dataclass(frozen=True)
class GpcSurrogate:
    """Expansion ``sum U_l Phi_l`` (1-D) or ``sum U_ij Phi_i(xi) Phi_j(eta)`` (2-D).

    ``coefficients`` has one trailing axis per random dimension, after any
    batch axes.
    """

    bases: tuple[OrthonormalBasis, ...]
    coefficients: np.ndarray

    def __post_init__(self):
        expected = tuple(b.size for b in self.bases)
        if self.coefficients.shape[-len(self.bases):] != expected:
            raise ValueError("coefficient shape does not match the basis sizes")

    @property
    def ndim(self) -> int:
        return len(self.bases)

    @property
    def basis(self) -> OrthonormalBasis:
        return self.bases[0]

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.coefficients.shape[: self.coefficients.ndim - self.ndim]

    def member(self, index) -> "GpcSurrogate":
        """The unbatched expansion at ``index`` of the batch axes."""
        return GpcSurrogate(self.bases, self.coefficients[index])

    def _series(self, xi: np.ndarray) -> np.ndarray:
        # runs the recurrence on the fly to avoid a points x degree table
        basis = self.basis
        c = self.coefficients[..., None, :]
        z = basis.dist.to_standard(xi)
        b = recurrence_coefficients(basis.measure, max(basis.degree, 1))
        prev, cur = np.zeros_like(z), np.ones_like(z)
        out = c[..., 0] * cur
        for k in range(basis.degree):
            prev, cur = cur, (z * cur - (b[k - 1] * prev if k else 0.0)) / b[k]
            out = out + c[..., k + 1] * cur
        return out

    def __call__(self, xi, eta=None):
        """Pointwise evaluation; output shape is ``batch + broadcast(xi, eta).shape``."""
        batch = self.batch_shape
        if self.ndim == 1:
            xi = np.asarray(xi, dtype=float)
            return self._series(xi.ravel()).reshape(batch + xi.shape)
        if eta is None:
            raise ValueError("a 2-D expansion needs both xi and eta")
        xi, eta = np.broadcast_arrays(np.asarray(xi, float), np.asarray(eta, float))
        vx = self.bases[0].vandermonde(xi.ravel())
        vy = self.bases[1].vandermonde(eta.ravel())
        out = np.einsum("pi,...ij,pj->...p", vx, self.coefficients, vy)
        return out.reshape(batch + xi.shape)

    def eval_grid(self, xi, eta) -> np.ndarray:
        """Values on the tensor grid ``xi x eta``; shape ``batch + (len(xi), len(eta))``."""
        vx = self.bases[0].vandermonde(np.ravel(xi))
        vy = self.bases[1].vandermonde(np.ravel(eta))
        return vx @ self.coefficients @ vy.T


def _check_rule(basis: OrthonormalBasis, rule: QuadratureRule, n_samples: int) -> None:
    if len(rule) != n_samples:
        raise ValueError(f"{n_samples} samples given for a {len(rule)}-point rule")
    if basis.degree > len(rule) - 1:
        raise ValueError(
            f"a {len(rule)}-point rule cannot resolve a degree-{basis.degree} projection"
        )


def project_coefficients(basis: OrthonormalBasis, samples, rule: QuadratureRule) -> GpcSurrogate:
    """``U_l = sum_j w_j U(xi_j) Phi_l(xi_j)`` with probability weights ``w_j``.

    ``samples[..., j]`` holds the model output at the j-th rule node.
    """
    u = np.asarray(samples, dtype=float)
    _check_rule(basis, rule, u.shape[-1])
    x, w = rule.mapped(basis.dist)
    V = basis.vandermonde(x)
    return GpcSurrogate((basis,), (u * w) @ V)


def build_tensor_surrogate(samples, rules, bases) -> GpcSurrogate:
    """Tensor-product projection of ``samples[..., l, m]`` taken at the rule nodes."""
    u = np.asarray(samples, dtype=float)
    (bx, by), (rx, ry) = bases, rules
    if u.ndim < 2 or u.shape[-2:] != (len(rx), len(ry)):
        raise ValueError(f"sample table {u.shape} does not match rules {(len(rx), len(ry))}")
    _check_rule(bx, rx, u.shape[-2])
    _check_rule(by, ry, u.shape[-1])
    x, wx = rx.mapped(bx.dist)
    y, wy = ry.mapped(by.dist)
    Vx = bx.vandermonde(x) * wx[:, None]
    Vy = by.vandermonde(y) * wy[:, None]
    return GpcSurrogate((bx, by), Vx.T @ u @ Vy)


def gpc_eval(surrogate: GpcSurrogate, xi, eta=None):
    out = surrogate(xi, eta)
    return float(out) if np.ndim(out) == 0 else out


def gpc_moments(surrogate: GpcSurrogate):
    """Mean ``U_0`` (or ``U_00``) and the root-sum-square of the other coefficients."""
    c = surrogate.coefficients
    axes = tuple(range(-surrogate.ndim, 0))
    mean = c[(...,) + (0,) * surrogate.ndim][()]
    rest = c.copy()
    rest[(...,) + (0,) * surrogate.ndim] = 0.0
    return MomentEstimate(mean, np.sqrt(np.sum(rest * rest, axis=axes)))


def fit_gpc(dist: DistributionSpec, func, L: int) -> GpcSurrogate:
    """Degree ``L - 1`` expansion of ``func`` from its values at the L-point Gauss rule."""
    rule = collocation_rule(dist, L)
    x, _ = rule.mapped(dist)
    return project_coefficients(build_basis(dist, L - 1), func(x), rule)


def fit_gpc_2d(dists, func, L: int, M: int) -> GpcSurrogate:
    rx, ry = collocation_rule(dists[0], L), collocation_rule(dists[1], M)
    x, _ = rx.mapped(dists[0])
    y, _ = ry.mapped(dists[1])
    samples = func(x[:, None], y[None, :])
    return build_tensor_surrogate(
        samples, (rx, ry), (build_basis(dists[0], L - 1), build_basis(dists[1], M - 1))
    )
