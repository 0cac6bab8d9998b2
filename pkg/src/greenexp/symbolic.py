"""
Exact algebra of graded terms ``c * u^alpha * r^(-p) * (log r)^s``.

A :class:`GradedFunction` is a finite sum of such terms stored in a dict keyed
by ``(alpha, p, s)``. Coefficients are either all :class:`fractions.Fraction`
(exact backend) or floats (float backend); arithmetic mixes them the way
Python does, so a float coefficient anywhere turns results into floats.

Storage keys are not a unique representation of the underlying function
(``x1^2/r^4 + x2^2/r^4 == 1/r^2`` in two dimensions).  :meth:`GradedFunction.canonical`
rewrites ``x1^2 = r^2 - (x2^2 + ... + xn^2)`` until every exponent on the first
axis is at most one, which is unique; comparisons go through that form.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Union

import numpy as np

from . import kernels

Scalar = Union[Fraction, float]
Key = tuple  # (alpha: tuple[int, ...], radial_power: int, log_power: int)

MIN_DIM = 2
MAX_DIM = 8


class GradingError(ArithmeticError):
    """An operation produced something outside the graded families.

    Reachable only through implementation bugs; carries a diagnostic payload.
    """

    def __init__(self, message, **payload):
        self.payload = payload
        if payload:
            details = ", ".join(f"{k}={v}" for k, v in payload.items())
            message = f"{message} ({details})"
        super().__init__(message)


def as_scalar(value, exact=True):
    """Coerce ``value`` to a backend scalar."""
    if exact:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, Rational)):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        if isinstance(value, float):
            return Fraction(value)
        raise TypeError(f"cannot make an exact scalar from {value!r}")
    return float(value)


def is_exact_scalar(value):
    return isinstance(value, (int, Fraction))


def format_scalar(value):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def unit_index(dim, axis, power=1):
    return tuple(power if k == axis else 0 for k in range(dim))


def _shift(alpha, axis, delta):
    out = list(alpha)
    out[axis] += delta
    return tuple(out)


@dataclass(frozen=True)
class GradedTerm:
    coeff: Scalar
    alpha: tuple
    radial_power: int
    log_power: int = 0

    @property
    def order(self):
        """|alpha|"""
        return sum(self.alpha)

    @property
    def degree(self):
        """Homogeneity degree |alpha| - p (the log factor does not count)."""
        return sum(self.alpha) - self.radial_power

    @property
    def is_monomial(self):
        return self.log_power == 0 and self.radial_power <= 0 and self.radial_power % 2 == 0

    @property
    def key(self):
        return (self.alpha, self.radial_power, self.log_power)

    def render(self):
        alpha = ",".join(str(a) for a in self.alpha)
        return (f"{format_scalar(self.coeff)} * x^({alpha}) * r^{-self.radial_power}"
                f" * log^{self.log_power}")


class GradedFunction:
    """Immutable normalized sum of graded terms in ``dim`` variables."""

    __slots__ = ("dim", "_terms")

    def __init__(self, dim: int, terms: Union[Mapping, Iterable[GradedTerm]] = ()):
        if not MIN_DIM <= dim <= MAX_DIM:
            raise ValueError(f"dimension {dim} outside supported range {MIN_DIM}..{MAX_DIM}")
        acc = {}
        items = terms.items() if isinstance(terms, Mapping) else (
            (t.key, t.coeff) for t in terms)
        for key, coeff in items:
            alpha, p, s = key
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != dim or min(alpha) < 0:
                raise ValueError(f"bad multi-index {alpha} for dimension {dim}")
            if s not in (0, 1):
                raise GradingError("log power outside {0, 1}", alpha=alpha, p=p, s=s)
            key = (alpha, int(p), int(s))
            acc[key] = acc.get(key, 0) + coeff
        self.dim = dim
        self._terms = {k: c for k, c in acc.items() if c != 0}

    # -- construction helpers -------------------------------------------

    @classmethod
    def zero(cls, dim):
        return cls(dim)

    @classmethod
    def term(cls, dim, coeff, alpha=None, radial_power=0, log_power=0):
        alpha = tuple(alpha) if alpha is not None else (0,) * dim
        return cls(dim, {(alpha, radial_power, log_power): coeff})

    @classmethod
    def monomial(cls, dim, alpha, coeff=Fraction(1)):
        return cls.term(dim, coeff, alpha, 0, 0)

    @classmethod
    def constant(cls, dim, coeff=Fraction(1)):
        return cls.term(dim, coeff)

    @classmethod
    def variable(cls, dim, axis, coeff=Fraction(1)):
        return cls.term(dim, coeff, unit_index(dim, axis))

    # -- container protocol ----------------------------------------------

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator[GradedTerm]:
        for key in sorted(self._terms, key=_sort_key, reverse=True):
            alpha, p, s = key
            yield GradedTerm(self._terms[key], alpha, p, s)

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def coeff(self, alpha, radial_power=0, log_power=0):
        return self._terms.get((tuple(alpha), radial_power, log_power), 0)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self, tol=0.0):
        """True when the canonical form vanishes (float coefficients up to ``tol``)."""
        if not self._terms:
            return True
        canon = self.canonical()
        if not canon._terms:
            return True
        if tol <= 0:
            return False
        return canon.max_abs() <= tol

    @property
    def is_exact(self):
        return all(is_exact_scalar(c) for c in self._terms.values())

    @property
    def is_polynomial(self):
        return all(GradedTerm(c, *k).is_monomial for k, c in self._terms.items())

    @property
    def has_log(self):
        return any(k[2] for k in self._terms)

    def max_abs(self):
        return max((abs(float(c)) for c in self._terms.values()), default=0.0)

    def degrees(self):
        return sorted({sum(a) - p for (a, p, s) in self._terms})

    def max_order(self):
        return max((sum(a) for (a, p, s) in self._terms), default=0)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, GradedFunction):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        merged = dict(self._terms)
        for k, c in other._terms.items():
            merged[k] = merged.get(k, 0) + c
        return GradedFunction(self.dim, merged)

    def __neg__(self):
        return GradedFunction(self.dim, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def scale(self, factor):
        return GradedFunction(self.dim, {k: c * factor for k, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, GradedFunction):
            return mul_poly(other, self) if other.is_polynomial else mul_poly(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def to_float(self):
        return GradedFunction(self.dim, {k: float(c) for k, c in self._terms.items()})

    def to_exact(self):
        return GradedFunction(self.dim, {k: as_scalar(c) for k, c in self._terms.items()})

    def map_coeffs(self, fn):
        return GradedFunction(self.dim, {k: fn(c) for k, c in self._terms.items()})

    def chop(self, tol):
        """Drop float coefficients with magnitude <= ``tol``."""
        return GradedFunction(self.dim, {k: c for k, c in self._terms.items()
                                         if is_exact_scalar(c) or abs(c) > tol})

    def filter(self, predicate):
        return GradedFunction(self.dim, {k: c for k, c in self._terms.items()
                                         if predicate(GradedTerm(c, *k))})

    def homogeneous_part(self, degree):
        return self.filter(lambda t: t.degree == degree)

    def split_by_degree(self):
        parts = {}
        for (a, p, s), c in self._terms.items():
            parts.setdefault(sum(a) - p, {})[(a, p, s)] = c
        return {h: GradedFunction(self.dim, parts[h]) for h in sorted(parts)}

    def polynomial_part(self):
        return self.filter(lambda t: t.is_monomial)

    def singular_part(self):
        return self.filter(lambda t: not t.is_monomial)

    # -- canonical form ---------------------------------------------------

    def canonical(self):
        """Unique representative with every first-axis exponent <= 1."""
        pending = dict(self._terms)
        out = {}
        while pending:
            key = max(pending, key=lambda k: (k[0][0], k))
            c = pending.pop(key)
            alpha, p, s = key
            if alpha[0] < 2:
                out[key] = out.get(key, 0) + c
                continue
            # x1^2 = r^2 - sum_{i>1} x_i^2
            base = _shift(alpha, 0, -2)
            k_r = (base, p - 2, s)
            pending[k_r] = pending.get(k_r, 0) + c
            for i in range(1, self.dim):
                k_i = (_shift(base, i, 2), p, s)
                pending[k_i] = pending.get(k_i, 0) - c
        return GradedFunction(self.dim, out)

    def expand_radial(self):
        """Rewrite even non-positive radial powers r^(2j) as monomials."""
        out = {}
        for (alpha, p, s), c in self._terms.items():
            if p > 0 or p % 2:
                out[(alpha, p, s)] = out.get((alpha, p, s), 0) + c
                continue
            for beta, mult in _expand_r2_power(self.dim, -p // 2).items():
                k = (tuple(a + b for a, b in zip(alpha, beta)), 0, s)
                out[k] = out.get(k, 0) + c * mult
        return GradedFunction(self.dim, out)

    def equals(self, other, rel_tol=0.0):
        diff = (self - other).canonical()
        if not diff._terms:
            return True
        if rel_tol <= 0:
            return False
        ref = max(self.canonical().max_abs(), other.canonical().max_abs(), 1e-300)
        return diff.max_abs() <= rel_tol * ref

    def __eq__(self, other):
        if not isinstance(other, GradedFunction) or other.dim != self.dim:
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    # -- numerics -------------------------------------------------------------

    def packed(self):
        """Arrays (coeffs, alphas, powers, logs) for the evaluation kernel."""
        keys = sorted(self._terms, key=_sort_key)
        coeffs = np.array([float(self._terms[k]) for k in keys], dtype=np.float64)
        alphas = np.array([k[0] for k in keys], dtype=np.int64).reshape(len(keys), self.dim)
        powers = np.array([k[1] for k in keys], dtype=np.int64)
        logs = np.array([k[2] for k in keys], dtype=np.int64)
        return coeffs, alphas, powers, logs

    def evaluate(self, points, kernel=None):
        """Values at an (N, dim) array of points (or a single point)."""
        pts = np.asarray(points, dtype=np.float64)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.dim:
            raise ValueError(f"points have {pts.shape[1]} columns, expected {self.dim}")
        kernel = kernel or kernels.eval_terms
        out = kernel(*self.packed(), np.ascontiguousarray(pts))
        return float(out[0]) if single else out

    # -- text -------------------------------------------------------------

    def render(self):
        if not self._terms:
            return "0"
        return " + ".join(t.render() for t in self)

    def __repr__(self):
        return f"GradedFunction(dim={self.dim}, {self.render()})"


def _sort_key(key):
    alpha, p, s = key
    return (sum(alpha), alpha, s, -p)


_R2_CACHE = {}


def _expand_r2_power(dim, j):
    """(x1^2 + ... + xn^2)^j as {alpha: multinomial}."""
    cache_key = (dim, j)
    if cache_key not in _R2_CACHE:
        poly = {(0,) * dim: 1}
        for _ in range(j):
            nxt = {}
            for alpha, c in poly.items():
                for i in range(dim):
                    b = _shift(alpha, i, 2)
                    nxt[b] = nxt.get(b, 0) + c
            poly = nxt
        _R2_CACHE[cache_key] = poly
    return _R2_CACHE[cache_key]


# --------------------------------------------------------------------------
# differential operators
# --------------------------------------------------------------------------

def partial(axis: int, f: GradedFunction) -> GradedFunction:
    """Exact d/du_axis (axis is zero-based)."""
    if not 0 <= axis < f.dim:
        raise ValueError(f"axis {axis} out of range for dimension {f.dim}")
    out = {}

    def add(key, c):
        out[key] = out.get(key, 0) + c

    for (alpha, p, s), c in f.items():
        a = alpha[axis]
        if a:
            add((_shift(alpha, axis, -1), p, s), c * a)
        up = _shift(alpha, axis, 1)
        if p:
            add((up, p + 2, s), -c * p)
        if s:
            add((up, p + 2, 0), c)
    return GradedFunction(f.dim, out)


def laplacian(f: GradedFunction) -> GradedFunction:
    """Exact Laplacian away from the origin.

    Uses  d(x^a r^-p) = r^-p d(x^a) + p (p + 2 - n - 2|a|) x^a r^-(p+2)  and
    d(phi log r) = log r d(phi) + (2(|a| - p) + n - 2) phi / r^2.
    """
    n = f.dim
    out = {}

    def add(key, c):
        out[key] = out.get(key, 0) + c

    for (alpha, p, s), c in f.items():
        order = sum(alpha)
        for i, a in enumerate(alpha):
            if a >= 2:
                add((_shift(alpha, i, -2), p, s), c * (a * (a - 1)))
        radial = p * (p + 2 - n - 2 * order)
        if radial:
            add((alpha, p + 2, s), c * radial)
        if s:
            cross = 2 * (order - p) + n - 2
            if cross:
                add((alpha, p + 2, 0), c * cross)
    return GradedFunction(n, out)


def euler_operator(f: GradedFunction) -> GradedFunction:
    """sum_i u_i d/du_i, the degree counter on homogeneous pieces."""
    out = GradedFunction.zero(f.dim)
    for i in range(f.dim):
        out = out + mul_poly(GradedFunction.variable(f.dim, i), partial(i, f))
    return out


def mul_poly(poly: GradedFunction, f: GradedFunction) -> GradedFunction:
    """Product of a polynomial with an arbitrary graded function."""
    if poly.dim != f.dim:
        raise ValueError(f"dimension mismatch: {poly.dim} vs {f.dim}")
    if not poly.is_polynomial:
        raise ValueError("left factor of mul_poly must be a polynomial")
    out = {}
    for (beta, q, _), c1 in poly.items():
        for (alpha, p, s), c2 in f.items():
            key = (tuple(a + b for a, b in zip(alpha, beta)), p + q, s)
            out[key] = out.get(key, 0) + c1 * c2
    return GradedFunction(f.dim, out)


# --------------------------------------------------------------------------
# space tags
# --------------------------------------------------------------------------

FAMILIES = ("E", "E_singular", "L", "F", "E_tilde")


@dataclass(frozen=True)
class SpaceTag:
    """Membership label for E^{n+2m}_{k+2m} and its relatives.

    ``k`` is unused for the log family ``L`` (which is L_m).
    """
    n: int
    m: int
    k: int = None
    family: str = "E"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.m < 0:
            raise ValueError("m must be >= 0")
        if self.family != "L" and (self.k is None or self.k < 1):
            raise ValueError(f"k must be >= 1 for family {self.family}, got {self.k}")

    @property
    def degree(self):
        """Homogeneity degree shared by members (k - n; m for L)."""
        return self.m if self.family == "L" else self.k - self.n

    def contains_term(self, term: GradedTerm) -> bool:
        n, m, k = self.n, self.m, self.k
        alpha, p, s = term.key
        if self.family == "L":
            return s == 1 and p <= 0 and p % 2 == 0 and sum(alpha) - p == m
        in_e = (s == 0 and sum(alpha) - p == k - n and p <= n + 2 * m
                and (n + 2 * m - p) % 2 == 0)
        if self.family == "E":
            return in_e
        if self.family == "E_singular":
            return in_e and p > 0
        in_f = in_e if k < n else (
            (in_e and p > 0) or SpaceTag(n, k - n, None, "L").contains_term(term))
        if self.family == "F":
            return in_f
        # E_tilde
        if k < n:
            return in_f
        return in_f or term.is_monomial


def classify(f: GradedFunction, tag: SpaceTag) -> bool:
    """True iff f is a member of the space labelled by ``tag``."""
    if f.dim != tag.n:
        raise ValueError(f"dimension mismatch: function has {f.dim}, tag has {tag.n}")
    if all(tag.contains_term(t) for t in f):
        return True
    return all(tag.contains_term(t) for t in f.canonical())


def classify_any(f: GradedFunction, tags) -> bool:
    """Membership in the direct sum of the given spaces (term-wise)."""
    tags = list(tags)
    for candidate in (f, f.canonical()):
        if all(any(tag.contains_term(t) for tag in tags) for t in candidate):
            return True
    return False
