import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_hermitenorm, eval_legendre

from cweno_uq.gpc import (
    GpcSurrogate,
    build_basis,
    build_tensor_surrogate,
    fit_gpc,
    fit_gpc_2d,
    gpc_eval,
    gpc_moments,
    project_coefficients,
)
from cweno_uq.random_space import collocation_rule, normal, uniform
from oracles import gram_schmidt


def _gram(dist, degree):
    basis = build_basis(dist, degree)
    rule = collocation_rule(dist, degree + 1)
    x, w = rule.mapped(dist)
    V = basis.vandermonde(x)
    return (V * w[:, None]).T @ V


class TestBasis:
    @pytest.mark.parametrize("dist", [uniform(), normal()], ids=["legendre", "hermite"])
    def test_gram_identity_degree_40(self, dist):
        G = _gram(dist, 40)
        assert np.max(np.abs(G - np.eye(41))) < 1e-12

    def test_legendre_against_scipy(self):
        z = np.linspace(-1, 1, 33)
        V = build_basis(uniform(), 25).vandermonde(z)
        for n in range(26):
            np.testing.assert_allclose(V[:, n], math.sqrt(2 * n + 1) * eval_legendre(n, z), atol=1e-12)

    def test_hermite_against_scipy(self):
        z = np.linspace(-5, 5, 41)
        V = build_basis(normal(), 20).vandermonde(z)
        for n in range(21):
            ref = eval_hermitenorm(n, z) / math.sqrt(math.factorial(n))
            np.testing.assert_allclose(V[:, n], ref, rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize(
        "dist, weight, lo, hi",
        [
            (uniform(), lambda z: sp.Rational(1, 2), -1, 1),
            (normal(), lambda z: sp.exp(-z**2 / 2) / sp.sqrt(2 * sp.pi), -sp.oo, sp.oo),
        ],
        ids=["legendre", "hermite"],
    )
    def test_monomial_table_matches_gram_schmidt(self, dist, weight, lo, hi):
        z, polys = gram_schmidt(weight, lo, hi, 5)
        table = build_basis(dist, 5).monomial_table
        for n, p in enumerate(polys):
            coeffs = [float(c) for c in reversed(sp.Poly(p, z).all_coeffs())]
            np.testing.assert_allclose(table[n, : len(coeffs)], coeffs, atol=1e-13)

    def test_affine_map(self):
        d = uniform(2.0, 6.0)
        V = build_basis(d, 3).vandermonde(np.array([2.0, 4.0, 6.0]))
        np.testing.assert_allclose(V[:, 1], math.sqrt(3) * np.array([-1.0, 0.0, 1.0]))

    def test_invalid_degree(self):
        with pytest.raises(ValueError):
            build_basis(uniform(), -1)


class TestProjection:
    def test_recovers_polynomials_exactly(self):
        d = uniform()
        basis = build_basis(d, 6)
        rule = collocation_rule(d, 7)
        x, _ = rule.mapped(d)
        c = np.arange(1.0, 8.0)
        sur = project_coefficients(basis, basis.vandermonde(x) @ c, rule)
        np.testing.assert_allclose(sur.coefficients, c, atol=1e-13)

    def test_rule_checks(self):
        d = uniform()
        with pytest.raises(ValueError):
            project_coefficients(build_basis(d, 7), np.zeros(7), collocation_rule(d, 7))
        with pytest.raises(ValueError):
            project_coefficients(build_basis(d, 3), np.zeros(5), collocation_rule(d, 4))
        with pytest.raises(ValueError):
            project_coefficients(build_basis(d, 3), np.zeros(4), collocation_rule(normal(), 4))

    def test_exact_moments_eq31(self):
        sur = fit_gpc(uniform(), lambda x: 3 * np.cos(np.pi * x), 15)
        m = gpc_moments(sur)
        assert abs(m.mean) < 1e-8
        assert abs(m.std - math.sqrt(4.5)) < 1e-6

    def test_moments_of_linear_normal(self):
        d = normal(1.5, 2.0)
        m = gpc_moments(fit_gpc(d, lambda x: 3 * x - 1, 5))
        assert m.mean == pytest.approx(3.5, abs=1e-13)
        assert m.std == pytest.approx(6.0, abs=1e-13)

    def test_spectral_convergence(self):
        f = lambda x: np.exp(np.sin(2 * x))
        x = np.linspace(-1, 1, 501)
        errs = [np.abs(fit_gpc(uniform(), f, L)(x) - f(x)).max() for L in (8, 16, 24)]
        assert errs[1] < 1e-3 * errs[0] and errs[2] < 1e-3 * errs[1]

    def test_batch_and_member(self):
        d = uniform()
        rule = collocation_rule(d, 9)
        x, _ = rule.mapped(d)
        samples = np.stack([np.sin(x), np.cos(x), x**2])
        sur = project_coefficients(build_basis(d, 8), samples, rule)
        pts = np.linspace(-1, 1, 11)
        assert sur(pts).shape == (3, 11)
        np.testing.assert_allclose(sur.member(1)(pts), sur(pts)[1], rtol=1e-15)
        assert gpc_moments(sur).mean.shape == (3,)

    def test_scalar_eval(self):
        sur = fit_gpc(uniform(), lambda x: x**2, 5)
        assert isinstance(gpc_eval(sur, 0.5), float)
        assert gpc_eval(sur, 0.5) == pytest.approx(0.25, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(degree=st.integers(0, 80), seed=st.integers(0, 2**16))
def test_recurrence_evaluation_matches_vandermonde(degree, seed):
    rng = np.random.default_rng(seed)
    basis = build_basis(uniform(), degree)
    c = rng.normal(size=degree + 1)
    sur = GpcSurrogate((basis,), c)
    x = np.linspace(-1, 1, 37)
    np.testing.assert_allclose(sur(x), basis.vandermonde(x) @ c, rtol=1e-12, atol=1e-12)


class TestTensor:
    def test_separable_polynomial(self):
        dists = (uniform(), normal())
        f = lambda x, y: (1 + x**2) * (y - 0.5 * y**3)
        sur = fit_gpc_2d(dists, f, 5, 6)
        x, y = np.linspace(-1, 1, 7), np.linspace(-3, 3, 9)
        np.testing.assert_allclose(sur.eval_grid(x, y), f(x[:, None], y[None, :]), atol=1e-12)
        np.testing.assert_allclose(sur(x[:4], y[:4]), f(x[:4], y[:4]), atol=1e-12)

    def test_moments_eq33(self):
        # E = 0 and Var = 9 * 1/2 * (1 + exp(-2 pi^2)) / 2
        sur = fit_gpc_2d((uniform(), normal()), lambda x, y: 3 * np.cos(np.pi * x) * np.cos(np.pi * y), 31, 41)
        m = gpc_moments(sur)
        assert abs(m.mean) < 1e-12
        assert m.std == pytest.approx(1.500000002006466, abs=1e-9)

    def test_shape_checks(self):
        d = uniform()
        rules = (collocation_rule(d, 4), collocation_rule(d, 5))
        bases = (build_basis(d, 3), build_basis(d, 4))
        with pytest.raises(ValueError):
            build_tensor_surrogate(np.zeros((5, 4)), rules, bases)
        with pytest.raises(ValueError):
            GpcSurrogate(bases, np.zeros((4, 4)))
        with pytest.raises(ValueError):
            GpcSurrogate(bases, np.zeros((4, 5)))(np.zeros(2))
