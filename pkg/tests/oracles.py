"""Independent reference computations used to derive frozen test values.

Nothing here imports from the package under test.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import sympy as sp
from scipy.optimize import brentq


def stoker_depth(x, t, h_left=1.0, h_right=0.5, g=1.0, x0=0.0):
    """Exact depth of the wet-wet dam break on a flat bottom.

    The middle state solves the rarefaction/shock matching condition; the
    profile is rarefaction fan, constant middle state, then the shock.
    """
    cl = math.sqrt(g * h_left)

    def mismatch(hm):
        u_rare = 2.0 * (cl - math.sqrt(g * hm))
        u_shock = (hm - h_right) * math.sqrt(0.5 * g * (hm + h_right) / (hm * h_right))
        return u_rare - u_shock

    hm = brentq(mismatch, h_right, h_left, xtol=1e-15)
    um = 2.0 * (cl - math.sqrt(g * hm))
    speed = hm * um / (hm - h_right)
    cm = math.sqrt(g * hm)

    xi = (np.asarray(x, dtype=float) - x0) / t
    h = np.full(xi.shape, h_right)
    h[xi < speed] = hm
    fan = (xi >= -cl) & (xi < um - cm)
    h[fan] = (2.0 * cl - xi[fan]) ** 2 / (9.0 * g)
    h[xi < -cl] = h_left
    return h


def stoker_middle_state(h_left=1.0, h_right=0.5, g=1.0):
    cl = math.sqrt(g * h_left)

    def mismatch(hm):
        u_rare = 2.0 * (cl - math.sqrt(g * hm))
        return u_rare - (hm - h_right) * math.sqrt(0.5 * g * (hm + h_right) / (hm * h_right))

    hm = brentq(mismatch, h_right, h_left, xtol=1e-15)
    return hm, 2.0 * (cl - math.sqrt(g * hm))


def gram_schmidt(weight, lo, hi, degree):
    """Exact orthonormal polynomials for ``weight`` on ``[lo, hi]`` via sympy."""
    z = sp.Symbol("z", real=True)
    basis = []
    for n in range(degree + 1):
        p = z**n
        for q in basis:
            p -= sp.integrate(p * q * weight(z), (z, lo, hi)) * q
        norm = sp.sqrt(sp.integrate(sp.expand(p * p) * weight(z), (z, lo, hi)))
        basis.append(sp.expand(p / norm))
    return z, basis


def lagrange_values(nodes, targets):
    """Exact rational Lagrange interpolation matrix (values at nodes -> targets)."""
    nodes = [Fraction(n) for n in nodes]
    out = []
    for t in targets:
        t = Fraction(t)
        row = []
        for i, ni in enumerate(nodes):
            v = Fraction(1)
            for j, nj in enumerate(nodes):
                if j != i:
                    v *= (t - nj) / (ni - nj)
            row.append(v)
        out.append(row)
    return out


def jiang_shu_indicator(coeffs, lo=-0.5, hi=0.5):
    """sum_i int (d^i P/ds^i)^2 ds for a polynomial in the local variable, exactly."""
    s = sp.Symbol("s")
    p = sum(sp.Rational(c) * s**k for k, c in enumerate(coeffs))
    total = 0
    for i in range(1, len(coeffs)):
        total += sp.integrate(sp.diff(p, s, i) ** 2, (s, sp.Rational(lo), sp.Rational(hi)))
    return sp.Rational(total)


def standard_normal_moment(k: int) -> float:
    return 0.0 if k % 2 else float(math.prod(range(k - 1, 0, -2)))


def gauss_legendre_mp(n: int, digits: int = 40):
    """Gauss-Legendre nodes and weights by Newton iteration in extended precision."""
    import mpmath as mp

    with mp.workdps(digits):
        nodes, weights = [], []
        for i in range(1, n + 1):
            x = mp.cos(mp.pi * (i - mp.mpf(1) / 4) / (n + mp.mpf(1) / 2))
            for _ in range(100):
                p = mp.legendre(n, x)
                dp = n * (x * p - mp.legendre(n - 1, x)) / (x * x - 1)
                step = p / dp
                x -= step
                if abs(step) < mp.mpf(10) ** (-digits + 5):
                    break
            dp = n * (x * mp.legendre(n, x) - mp.legendre(n - 1, x)) / (x * x - 1)
            nodes.append(float(x))
            weights.append(float(2 / ((1 - x * x) * dp * dp)))
    order = np.argsort(nodes)
    return np.array(nodes)[order], np.array(weights)[order]
