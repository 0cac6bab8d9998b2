import math
from fractions import Fraction

import numpy as np
import pytest

from greenexp.symbolic import GradedFunction, laplacian, partial
from greenexp.transform import (NotSPDError, derivative_in_x, frozen_operator,
                                fundamental_frozen, laplace_constant, poly_x_to_u,
                                spd_sqrt_inverse)
from conftest import graded


def test_identity():
    T = spd_sqrt_inverse([[1, 0], [0, 1]])
    assert T.exact and T.det_factor == 1
    assert np.array_equal(T.matrix, np.eye(2))


def test_diag_exact():
    T = spd_sqrt_inverse([[4, 0], [0, 1]])
    assert T.exact
    assert T.entries == ((Fraction(1, 2), 0), (0, 1))
    assert T.det_factor == Fraction(1, 2)


def test_offdiagonal_eigen_oracle():
    K = np.array([[2.0, 1.0], [1.0, 2.0]])
    T = spd_sqrt_inverse(K)
    assert not T.exact
    assert np.allclose(T.matrix, [[0.78868, -0.21132], [-0.21132, 0.78868]], atol=1e-5)
    assert np.allclose(T.matrix @ T.matrix.T @ K, np.eye(2), atol=1e-12)
    assert math.isclose(T.det_factor, 1 / math.sqrt(3), rel_tol=1e-12)


def test_rejects_indefinite():
    with pytest.raises(NotSPDError):
        spd_sqrt_inverse([[1.0, 2.0], [2.0, 1.0]])


def test_symmetrizes_noise():
    T = spd_sqrt_inverse([[2.0, 1.0 + 1e-14], [1.0, 2.0]])
    assert np.allclose(T.matrix, T.matrix.T)


def test_laplace_constants():
    # n(n-2) w_n in the denominator: 4 pi for n = 3, 4 pi^2 / 2 ... for n = 4
    for n in range(3, 9):
        q, e = laplace_constant(n)
        omega = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
        assert math.isclose(float(q) / math.pi ** e, 1 / (n * (n - 2) * omega), rel_tol=1e-14)
    q, e = laplace_constant(2)
    assert (q, e) == (Fraction(-1, 2), 1)


def test_fundamental_examples():
    f2 = fundamental_frozen([[1, 0], [0, 1]], 2)
    assert f2.kind == "log" and math.isclose(f2.scale, -1 / (2 * math.pi))
    f3 = fundamental_frozen(np.eye(3).tolist(), 3)
    assert math.isclose(f3.scale, 1 / (4 * math.pi))
    assert f3.kernel.equals(graded(3, (1, (0, 0, 0), 1, 0)))
    fd = fundamental_frozen([[4, 0], [0, 1]], 2)
    assert math.isclose(fd.scale, -1 / (4 * math.pi))


def _flux(K, n, radius=0.1, nodes=64):
    """Outward flux of K grad Phi0 through the sphere |x| = radius."""
    K = np.asarray(K, dtype=float)
    fs = fundamental_frozen(K.tolist(), n)
    T = fs.transform.to_float()
    grads = [derivative_in_x(i, fs.kernel, T) for i in range(n)]
    if n == 2:
        t = np.linspace(0, 2 * np.pi, 4 * nodes, endpoint=False)
        nu = np.column_stack([np.cos(t), np.sin(t)])
        w = np.full(len(t), 2 * np.pi * radius / len(t))
    else:
        # Gauss-Legendre in cos(theta) x trapezoid in phi
        c, wc = np.polynomial.legendre.leggauss(nodes)
        phi = np.linspace(0, 2 * np.pi, 2 * nodes, endpoint=False)
        C, P = np.meshgrid(c, phi)
        S = np.sqrt(1 - C ** 2)
        nu = np.column_stack([(S * np.cos(P)).ravel(), (S * np.sin(P)).ravel(), C.ravel()])
        w = (np.outer(np.ones_like(phi), wc) * (2 * np.pi / len(phi))).ravel() * radius ** 2
    x = radius * nu
    u = T.apply(x, np.zeros(n))
    g = np.column_stack([gi.evaluate(u) for gi in grads]) * fs.scale
    return float(np.sum(w * np.einsum("ij,ij->i", g @ K.T, nu)))


@pytest.mark.parametrize("K,n", [
    ([[1, 0], [0, 1]], 2),
    ([[4, 0], [0, 1]], 2),
    ([[2, 1], [1, 2]], 2),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 3),
    ([[3, 0.5, 0], [0.5, 2, 0.2], [0, 0.2, 1]], 3),
])
def test_flux_normalization(K, n):
    assert abs(_flux(K, n) + 1) < 1e-6


def test_derivative_in_x_examples():
    lg = graded(2, (1, (0, 0), 0, 1))
    I = spd_sqrt_inverse([[1, 0], [0, 1]])
    assert derivative_in_x(0, lg, I).equals(partial(0, lg))
    T = spd_sqrt_inverse([[4, 0], [0, 1]])
    assert derivative_in_x(0, lg, T).equals(graded(2, (Fraction(1, 2), (1, 0), 2, 0)))
    assert not derivative_in_x(1, GradedFunction.constant(2, Fraction(3)), T)


def test_derivative_in_x_chain_rule_numeric():
    K = np.array([[2.0, 1.0], [1.0, 2.0]])
    T = spd_sqrt_inverse(K)
    f = graded(2, (1, (1, 0), 0, 1), (2, (0, 1), 2, 0))
    x = np.array([0.31, -0.17])
    h = 1e-6
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        fd = (f.evaluate(T.apply(x + e, 0)[0]) - f.evaluate(T.apply(x - e, 0)[0])) / (2 * h)
        exact = derivative_in_x(i, f, T).evaluate(T.apply(x, 0)[0])
        assert math.isclose(fd, exact, rel_tol=1e-7)


def test_poly_x_to_u_examples():
    T = spd_sqrt_inverse([[4, 0], [0, 1]])
    assert poly_x_to_u(GradedFunction.constant(2), T).equals(GradedFunction.constant(2))
    assert poly_x_to_u(GradedFunction.variable(2, 0), T).equals(graded(2, (2, (1, 0), 0, 0)))
    assert poly_x_to_u(GradedFunction.monomial(2, (1, 1)), T).equals(graded(2, (2, (1, 1), 0, 0)))


def test_frozen_operator_annihilates_fundamental():
    for K in ([[1, 0], [0, 1]], [[4, 0], [0, 1]], [[2.0, 1.0], [1.0, 2.0]],
              [[3.0, 0.5, 0.0], [0.5, 2.0, 0.2], [0.0, 0.2, 1.0]]):
        n = len(K)
        fs = fundamental_frozen(K, n)
        T = fs.transform if fs.transform.exact else fs.transform.to_float()
        out = frozen_operator(fs.kernel, K, T)
        assert out.canonical().is_zero(tol=1e-12)


def test_frozen_conjugation_random():
    rng = np.random.default_rng(9)
    for _ in range(30):
        n = int(rng.integers(2, 4))
        A = rng.normal(size=(n, n))
        K = A @ A.T + n * np.eye(n)
        T = spd_sqrt_inverse(K).to_float()
        g = graded(n, (Fraction(int(rng.integers(1, 5))), tuple(rng.integers(0, 3, size=n)),
                       int(rng.integers(0, n + 2)), 0))
        lhs = frozen_operator(g, K.tolist(), T)
        rhs = -laplacian(g)
        # relative to |K| |g| so that a vanishing Laplacian is handled
        ref = np.abs(K).max() * float(g.max_abs()) * 10
        assert (lhs - rhs).canonical().max_abs() <= 1e-10 * ref
