import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from greenexp.symbolic import GradedFunction


def symbols(n):
    return sp.symbols(f"x1:{n + 1}", real=True)


def to_sympy(f: GradedFunction):
    """Independent sympy image of a graded function (r and log r spelled out)."""
    xs = symbols(f.dim)
    r = sp.sqrt(sum(x ** 2 for x in xs))
    expr = sp.Integer(0)
    for t in f:
        alpha, p, s = t.key
        c = t.coeff
        c = sp.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sp.Float(c)
        mono = sp.Mul(*[x ** a for x, a in zip(xs, alpha)])
        expr += c * mono * r ** (-p) * sp.log(r) ** s
    return expr


def sympy_equal(a, b, n, samples=6, rtol=1e-12, seed=0):
    """Compare two sympy expressions at random points (robust to radical forms)."""
    xs = symbols(n)
    rng = np.random.default_rng(seed)
    fa = sp.lambdify(xs, a, "mpmath")
    fb = sp.lambdify(xs, b, "mpmath")
    for _ in range(samples):
        pt = [sp.Rational(int(v), 97) for v in rng.integers(-90, 90, size=n)]
        if all(v == 0 for v in pt):
            continue
        va, vb = complex(fa(*pt)), complex(fb(*pt))
        if not math.isclose(abs(va - vb), 0.0, abs_tol=rtol * (1 + abs(va))):
            return False
    return True


def graded(n, *terms):
    """terms: (coeff, alpha, p, s)."""
    out = GradedFunction.zero(n)
    for c, alpha, p, s in terms:
        out = out + GradedFunction.term(n, Fraction(c), tuple(alpha), p, s)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
