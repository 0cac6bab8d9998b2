"""
Exact right-inverses of the Laplacian on the graded families.

Every term is inverted by one of three elementary steps, applied to a work
list in order of descending |alpha| (ties broken lexicographically):

radial step (log-free, p != 2 or n odd)
    g = x^a r^-(p-2) / d  with  d = (p - 2)(p - n - 2|a|); the leftover
    -r^-(p-2) lap(x^a) / d  is pushed back onto the work list.  For p <= 0
    this is the polynomial Poisson solve, for p >= n the odd-dimension
    decreasing induction.
resonant step (n even, p = 2)
    g = x^a log r / (2|a| + n - 2); leftover -log r lap(x^a) / (2|a| + n - 2).
log step (s = 1, p = -2l <= 0)
    g = x^a r^(2l+2) log r / d with the same d; leftovers are the log term
    -r^(2l+2) log r lap(x^a) / d and the polynomial -e x^a r^(2l) / d with
    e = 2|a| + 4l + n + 2.

Polynomial outputs are always multiples of r^2, i.e. free of harmonic
components, which fixes the representative in even dimension.
"""
from __future__ import annotations

from fractions import Fraction

from .symbolic import (
    GradedFunction,
    GradingError,
    SpaceTag,
    classify,
    classify_any,
    is_exact_scalar,
)


class UntaggableError(ValueError):
    """Input does not belong to any graded family the solvers accept."""


def _divide(c, d):
    if is_exact_scalar(c):
        return Fraction(c) / d
    return c / d


def _order_key(key):
    alpha, p, s = key
    return (sum(alpha), alpha, s, p)


def _invert(f: GradedFunction) -> GradedFunction:
    n = f.dim
    pending = dict(f.items())
    out = {}

    def push(key, c):
        pending[key] = pending.get(key, 0) + c

    def emit(key, c):
        out[key] = out.get(key, 0) + c

    while pending:
        key = max(pending, key=_order_key)
        c = pending.pop(key)
        if c == 0:
            continue
        alpha, p, s = key
        order = sum(alpha)
        lap_alpha = [(i, a * (a - 1)) for i, a in enumerate(alpha) if a >= 2]

        def spawn(p_new, s_new, factor):
            for i, mult in lap_alpha:
                beta = list(alpha)
                beta[i] -= 2
                push((tuple(beta), p_new, s_new), factor * mult)

        if s == 0 and not (p == 2 and n % 2 == 0):
            d = (p - 2) * (p - n - 2 * order)
            if d == 0:
                raise GradingError("vanishing radial divisor", n=n, alpha=alpha, p=p)
            g = _divide(c, d)
            emit((alpha, p - 2, 0), g)
            spawn(p - 2, 0, -g)
        elif s == 0:
            d = 2 * order + n - 2
            if d == 0:
                raise GradingError("vanishing resonant divisor", n=n, alpha=alpha, p=p)
            g = _divide(c, d)
            emit((alpha, 0, 1), g)
            spawn(0, 1, -g)
        else:
            if p > 0 or p % 2:
                raise GradingError("log term with singular radial factor", n=n,
                                   alpha=alpha, p=p)
            d = (p - 2) * (p - n - 2 * order)
            g = _divide(c, d)
            emit((alpha, p - 2, 1), g)
            spawn(p - 2, 1, -g)
            push((alpha, p, 0), -g * (2 * order - 2 * p + n + 2))
    return GradedFunction(n, out)


# --------------------------------------------------------------------------
# tag inference
# --------------------------------------------------------------------------

def infer_tag(f: GradedFunction) -> SpaceTag:
    """Smallest tag (minimal m) of the parity-appropriate family holding f.

    ``f`` must be homogeneous.  Odd n gives family E; even n gives E_tilde,
    or L when every term carries the log factor.
    """
    n = f.dim
    degrees = f.degrees()
    if len(degrees) != 1:
        raise UntaggableError(f"not homogeneous: degrees {degrees}")
    h = degrees[0]
    if f.has_log and all(k[2] for k in f.keys()) and n % 2 == 0:
        tag = SpaceTag(n, h, None, "L")
        if classify(f, tag):
            return tag
        raise UntaggableError(f"log terms outside L_{h}")
    k = h + n
    if k < 1:
        raise UntaggableError(f"degree {h} is too singular (k = {k} < 1)")
    pmax = max(p for (_, p, _) in f.keys())
    m = max(0, -(-(pmax - n) // 2))
    tag = SpaceTag(n, m, k, "E" if n % 2 else "E_tilde")
    if not classify(f, tag):
        raise UntaggableError(f"terms of {f.render()} do not fit {tag}")
    return tag


def output_tag(tag: SpaceTag) -> SpaceTag:
    if tag.family == "L":
        return SpaceTag(tag.n, tag.m + 2, None, "L")
    return SpaceTag(tag.n, tag.m, tag.k + 2, tag.family)


def output_in_space(g: GradedFunction, tag: SpaceTag) -> bool:
    """Check the grading promised for the inverse of a member of ``tag``."""
    out = output_tag(tag)
    if tag.family == "L":
        return classify_any(g, [out, _PolynomialTag(g.dim)])
    return classify(g, out)


class _PolynomialTag:
    """Pseudo-tag for R[x] used in direct sums."""

    def __init__(self, n):
        self.n = n

    def contains_term(self, term):
        return term.is_monomial

# --------------------------------------------------------------------------
# public solvers
# --------------------------------------------------------------------------

def _require(f, tag, expected_family, parity):
    if tag.n != f.dim:
        raise ValueError(f"dimension mismatch: function has {f.dim}, tag has {tag.n}")
    if parity is not None and f.dim % 2 != parity:
        raise ValueError(f"dimension {f.dim} has the wrong parity for this solver")
    if tag.family not in expected_family:
        raise ValueError(f"tag family {tag.family} not accepted here")
    if not classify(f, tag):
        raise UntaggableError(f"{f.render()} is not in {tag}")


def solve_E_odd(f: GradedFunction, tag: SpaceTag = None) -> GradedFunction:
    """g in E^{n+2m}_{k+2m+2} with lap g = f, for odd n."""
    if not f:
        return GradedFunction.zero(f.dim)
    tag = tag or infer_tag(f)
    _require(f, tag, ("E",), 1)
    return _invert(f)


def poisson_polynomial(p: GradedFunction) -> GradedFunction:
    """Polynomial q in r^2 R[x] with lap q = p."""
    if not p.is_polynomial:
        raise ValueError("poisson_polynomial needs a polynomial right-hand side")
    return _invert(p)


def solve_log(f: GradedFunction, tag: SpaceTag = None) -> GradedFunction:
    """g in L_{m+2} + R[x] with lap g = f, for f in L_m (n even)."""
    if not f:
        return GradedFunction.zero(f.dim)
    if f.dim % 2:
        raise ValueError("log spaces only arise in even dimension")
    if not all(k[2] == 1 for k in f.keys()):
        raise UntaggableError("solve_log needs every term to carry log r")
    tag = tag or infer_tag(f)
    _require(f, tag, ("L",), 0)
    return _invert(f)


def solve_F_even(f: GradedFunction, tag: SpaceTag = None) -> GradedFunction:
    """g in E~^{n+2m}_{k+2m+2} with lap g = f, for even n."""
    if not f:
        return GradedFunction.zero(f.dim)
    tag = tag or infer_tag(f)
    _require(f, tag, ("E_tilde", "F", "E", "E_singular", "L"), 0)
    return _invert(f)


def solve_graded(f: GradedFunction, n: int = None) -> GradedFunction:
    """Laplace right-inverse of an arbitrary sum of graded pieces.

    The input is split by homogeneity degree, each piece is tagged (raising
    :class:`UntaggableError` if impossible) and inverted by the parity's
    solver. Linear by construction.
    """
    if n is not None and n != f.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {n}")
    out = GradedFunction.zero(f.dim)
    for piece in f.split_by_degree().values():
        if f.dim % 2:
            out = out + solve_E_odd(piece)
            continue
        if all(k[2] for k in piece.keys()):
            out = out + solve_log(piece)
        else:
            out = out + solve_F_even(piece)
    return out
