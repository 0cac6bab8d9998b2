"""
Anisotropic coordinate change u = T (x - y) with T symmetric positive definite
and T K(y) T = I, together with the frozen-coefficient fundamental solution.

Graded functions downstream always live in u-coordinates; x-derivatives are
expanded through ``d/dx_i = sum_k T[k][i] d/du_k`` rather than composing
graded terms with linear maps (the graded spaces are not closed under that).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .symbolic import GradedFunction, is_exact_scalar, mul_poly, partial

EIGEN_FLOOR = 1e-10


class NotSPDError(ValueError):
    def __init__(self, eigenvalue, message=None):
        self.eigenvalue = eigenvalue
        super().__init__(message or f"matrix is not positive definite (eigenvalue {eigenvalue:.6g})")


def _exact_sqrt(q: Fraction):
    """sqrt(q) as a Fraction when q is a rational square, else None."""
    if q <= 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def _as_matrix(K):
    rows = [list(row) for row in K]
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("coefficient matrix must be square")
    return rows


@dataclass(frozen=True)
class Transform:
    """T = K(y)^(-1/2), its inverse and det_factor = det(K(y))^(-1/2).

    ``entries``/``inverse_entries`` hold backend scalars (Fractions when the
    root is rational, floats otherwise).
    """
    entries: tuple
    inverse_entries: tuple
    det_factor: object

    @property
    def dim(self):
        return len(self.entries)

    @property
    def exact(self):
        return all(is_exact_scalar(v) for row in self.entries for v in row) and \
            is_exact_scalar(self.det_factor)

    @property
    def matrix(self):
        return np.array([[float(v) for v in row] for row in self.entries])

    @property
    def inverse_matrix(self):
        return np.array([[float(v) for v in row] for row in self.inverse_entries])

    def to_float(self):
        return Transform(
            tuple(tuple(float(v) for v in row) for row in self.entries),
            tuple(tuple(float(v) for v in row) for row in self.inverse_entries),
            float(self.det_factor),
        )

    def apply(self, points, center):
        """u = T (x - center) for an (N, n) array."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (pts - np.asarray(center, dtype=float)) @ self.matrix.T


def spd_sqrt_inverse(K, bounds=None) -> Transform:
    """Symmetric T with T T^t = K^-1.

    Diagonal K with rational-square entries gives an exact transform;
    everything else goes through ``numpy.linalg.eigh`` after symmetrizing.
    """
    rows = _as_matrix(K)
    n = len(rows)
    diag_only = all(rows[i][j] == 0 for i in range(n) for j in range(n) if i != j)
    if diag_only and all(is_exact_scalar(rows[i][i]) for i in range(n)):
        roots = [_exact_sqrt(Fraction(rows[i][i])) for i in range(n)]
        for i in range(n):
            if Fraction(rows[i][i]) <= 0:
                raise NotSPDError(float(rows[i][i]))
        if all(r is not None for r in roots):
            ent = tuple(tuple(1 / roots[i] if i == j else Fraction(0) for j in range(n))
                        for i in range(n))
            inv = tuple(tuple(roots[i] if i == j else Fraction(0) for j in range(n))
                        for i in range(n))
            det = Fraction(1)
            for r in roots:
                det /= r
            _check_bounds([float(rows[i][i]) for i in range(n)], bounds)
            return Transform(ent, inv, det)
    A = np.array([[float(v) for v in row] for row in rows])
    A = 0.5 * (A + A.T)
    lam, V = np.linalg.eigh(A)
    if lam[0] < EIGEN_FLOOR:
        raise NotSPDError(float(lam[0]))
    _check_bounds(lam, bounds)
    T = (V * lam ** -0.5) @ V.T
    Tinv = (V * lam ** 0.5) @ V.T
    T = 0.5 * (T + T.T)
    Tinv = 0.5 * (Tinv + Tinv.T)
    det = float(np.prod(lam ** -0.5))
    return Transform(tuple(map(tuple, T.tolist())), tuple(map(tuple, Tinv.tolist())), det)


def _check_bounds(eigenvalues, bounds):
    if bounds is None:
        return
    lo, hi = bounds
    for lam in eigenvalues:
        if lam < lo or lam > hi:
            raise NotSPDError(float(lam), f"eigenvalue {lam:.6g} outside ellipticity "
                                          f"bounds [{lo}, {hi}]")


# --------------------------------------------------------------------------
# fundamental solution of the frozen operator
# --------------------------------------------------------------------------

def _double_factorial(k):
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def laplace_constant(n):
    """(q, e) with the -Laplace fundamental solution constant equal to q / pi^e.

    n = 2 gives the coefficient of log|u|; n >= 3 the coefficient of
    |u|^(2-n), i.e. 1 / (n (n-2) w_n).
    """
    if n == 2:
        return Fraction(-1, 2), 1
    if n % 2 == 0:
        return Fraction(math.factorial(n // 2 - 1), 2 * (n - 2)), n // 2
    return Fraction(_double_factorial(n - 2), 2 ** ((n + 1) // 2) * (n - 2)), (n - 1) // 2


@dataclass(frozen=True)
class FundamentalSolution:
    """det_factor * Phi_0(u) as ``scale * kernel``.

    ``kernel`` is the unit graded term (log|u| or |u|^(2-n)); ``scale`` is
    det_factor * q / pi^e with (q, e) from :func:`laplace_constant`.
    """
    dim: int
    transform: Transform
    q: Fraction
    pi_power: int

    @property
    def det_factor(self):
        return self.transform.det_factor

    @property
    def kind(self):
        return "log" if self.dim == 2 else "power"

    @property
    def kernel(self) -> GradedFunction:
        n = self.dim
        if n == 2:
            return GradedFunction.term(n, Fraction(1), (0, 0), 0, 1)
        return GradedFunction.term(n, Fraction(1), (0,) * n, n - 2, 0)

    @property
    def rational_scale(self):
        """det_factor * q (exact when the transform is), the factor of pi^-e."""
        return self.det_factor * self.q

    @property
    def scale(self) -> float:
        return float(self.rational_scale) / math.pi ** self.pi_power

    @property
    def function(self) -> GradedFunction:
        return self.kernel.scale(self.scale)


def fundamental_frozen(K_at_y, n=None) -> FundamentalSolution:
    transform = K_at_y if isinstance(K_at_y, Transform) else spd_sqrt_inverse(K_at_y)
    n = n or transform.dim
    if n != transform.dim:
        raise ValueError(f"dimension mismatch: {n} vs {transform.dim}")
    q, e = laplace_constant(n)
    return FundamentalSolution(n, transform, q, e)


# --------------------------------------------------------------------------
# calculus through the transform
# --------------------------------------------------------------------------

def derivative_in_x(axis: int, f: GradedFunction, T: Transform) -> GradedFunction:
    """d/dx_axis of f(T(x - y)), expressed in u-coordinates."""
    out = GradedFunction.zero(f.dim)
    for k in range(f.dim):
        coef = T.entries[k][axis]
        if coef != 0:
            out = out + partial(k, f).scale(coef)
    return out


def frozen_operator(f: GradedFunction, K, T: Transform) -> GradedFunction:
    """-sum_ij K_ij d_i d_j of f(T(x - y)) in u-coordinates."""
    n = f.dim
    first = [derivative_in_x(j, f, T) for j in range(n)]
    out = GradedFunction.zero(n)
    for i in range(n):
        for j in range(n):
            kij = K[i][j]
            if kij != 0:
                out = out - derivative_in_x(i, first[j], T).scale(kij)
    return out


def poly_x_to_u(p: GradedFunction, T_inv) -> GradedFunction:
    """Substitute x - y = T^-1 u into a polynomial in x - y."""
    if not p.is_polynomial:
        raise ValueError("poly_x_to_u needs a polynomial")
    entries = T_inv.inverse_entries if isinstance(T_inv, Transform) else T_inv
    n = p.dim
    # x_j - y_j = sum_k Tinv[j][k] u_k
    linear = []
    for j in range(n):
        linear.append(GradedFunction(n, {
            (tuple(1 if i == k else 0 for i in range(n)), 0, 0): entries[j][k]
            for k in range(n) if entries[j][k] != 0}))
    powers = {}

    def power(j, e):
        if (j, e) not in powers:
            powers[(j, e)] = GradedFunction.constant(n) if e == 0 else \
                mul_poly(linear[j], power(j, e - 1))
        return powers[(j, e)]

    out = GradedFunction.zero(n)
    for (beta, _, _), c in p.expand_radial().items():
        term = GradedFunction.constant(n, c)
        for j, e in enumerate(beta):
            if e:
                term = mul_poly(power(j, e), term)
        out = out + term
    return out
