"""
Singular expansion of the Green's function of -div(K(x) grad) at a base point.

The recursion works in u = T (x - y) coordinates with T = K(y)^(-1/2):

    zeta_0 = fundamental kernel (log|u| or |u|^(2-n), unit normalization)
    rhs_j  = div((K - K(y)) grad zeta_(j-1))     (x-derivatives through T)
    zeta_j = lap^-1(-rhs_j restricted to degrees <= l - 1)

Pieces of the zeta_j are grouped by homogeneity degree, degree i + 2 - n giving
Phi_i. Everything is multiplied by the fundamental-solution scale at the end,
so with a rational T all coefficients stay exact up to the factor pi^-e.

The residual div(K grad S), S = zeta_0 + sum zeta_j, is what the regular part
has to absorb; it only contains terms of homogeneity degree >= l.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict

import numpy as np

from .inverse import solve_graded
from .symbolic import (
    GradedFunction,
    GradingError,
    SpaceTag,
    classify,
    format_scalar,
    is_exact_scalar,
    laplacian,
    mul_poly,
)
from .transform import (
    FundamentalSolution,
    NotSPDError,
    Transform,
    derivative_in_x,
    fundamental_frozen,
    poly_x_to_u,
    spd_sqrt_inverse,
)

SCHEMA_VERSION = 1
FLOAT_CHOP = 1e-13


# --------------------------------------------------------------------------
# domains and coefficient specs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Unit disk / ball or an axis-aligned box."""
    kind: str
    dim: int = 2
    lo: tuple = None
    hi: tuple = None

    @classmethod
    def unit_disk(cls, dim=2):
        return cls("disk", dim, (-1.0,) * dim, (1.0,) * dim)

    @classmethod
    def unit_square(cls, dim=2):
        return cls("box", dim, (0.0,) * dim, (1.0,) * dim)

    @classmethod
    def box(cls, lo, hi):
        lo, hi = tuple(float(v) for v in lo), tuple(float(v) for v in hi)
        if len(lo) != len(hi) or any(a >= b for a, b in zip(lo, hi)):
            raise ValueError(f"bad box bounds {lo} {hi}")
        return cls("box", len(lo), lo, hi)

    def __post_init__(self):
        if self.kind not in ("disk", "box"):
            raise ValueError(f"unknown domain kind {self.kind!r}")

    def describe(self):
        if self.kind == "disk":
            return "disk"
        if self.lo == (0.0,) * self.dim and self.hi == (1.0,) * self.dim:
            return "square"
        return "box " + " ".join(f"{a!r}:{b!r}" for a, b in zip(self.lo, self.hi))

    def distance_to_boundary(self, points):
        """Signed distance, positive inside."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "disk":
            return 1.0 - np.sqrt((pts ** 2).sum(axis=1))
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        return np.minimum(pts - lo, hi - pts).min(axis=1)

    def contains(self, points, margin=0.0):
        return self.distance_to_boundary(points) > margin

    def lattice(self, per_axis=9):
        """Sample points of the closed domain on a coarse tensor lattice."""
        axes = [np.linspace(a, b, per_axis) for a, b in zip(self.lo, self.hi)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        return pts[self.distance_to_boundary(pts) >= -1e-12]


def _poly(text_or_terms, dim):
    if isinstance(text_or_terms, GradedFunction):
        return text_or_terms
    if isinstance(text_or_terms, (int, Fraction)):
        return GradedFunction.constant(dim, Fraction(text_or_terms))
    raise TypeError(f"cannot use {text_or_terms!r} as a coefficient polynomial")


@dataclass(frozen=True)
class CoefficientSpec:
    """Polynomial coefficient matrix K(x) on a domain.

    ``entries`` is an n x n nested tuple of polynomial GradedFunctions in x
    (absolute coordinates). ``bounds`` are the ellipticity bounds checked on a
    lattice of the domain.
    """
    dim: int
    entries: tuple
    domain: Domain
    bounds: tuple = (1e-10, math.inf)
    name: str = "custom"

    def __post_init__(self):
        n = self.dim
        ent = tuple(tuple(_poly(e, n) for e in row) for row in self.entries)
        object.__setattr__(self, "entries", ent)
        if len(ent) != n or any(len(row) != n for row in ent):
            raise ValueError("coefficient matrix must be n x n")
        for row in ent:
            for e in row:
                if e.dim != n or not e.is_polynomial:
                    raise ValueError("coefficient entries must be polynomials in x1..xn")
        if self.domain.dim != n:
            raise ValueError("domain dimension does not match")

    def validate(self, per_axis=None):
        """Check symmetry and ellipticity on a lattice; returns self."""
        n = self.dim
        for i in range(n):
            for j in range(i + 1, n):
                if not self.entries[i][j].equals(self.entries[j][i]):
                    raise ValueError(f"K is not symmetric: K{i+1}{j+1} != K{j+1}{i+1}")
        per_axis = per_axis or (9 if n <= 3 else 3)
        pts = self.domain.lattice(per_axis)
        lo, hi = self.bounds
        lam = np.linalg.eigvalsh(self.matrix_field(pts))
        tol = 1e-12 * max(1.0, float(np.abs(lam).max()))
        bad = np.nonzero((lam[:, 0] < lo - tol) | (lam[:, -1] > hi + tol))[0]
        if bad.size:
            k = bad[0]
            ev = lam[k, 0] if lam[k, 0] < lo - tol else lam[k, -1]
            raise NotSPDError(float(ev), f"K fails ellipticity bounds [{lo}, {hi}] at "
                                         f"{tuple(round(float(v), 6) for v in pts[k])}: eigenvalue {ev:.6g}")
        return self

    @property
    def max_degree(self):
        return max(e.max_order() for row in self.entries for e in row)

    def matrix_at(self, y):
        """K(y) with backend scalars (Fractions when y is exact)."""
        return [[_eval_poly(e, y) for e in row] for row in self.entries]

    def matrix_field(self, points):
        """K at an (N, n) array of points as an (N, n, n) float array."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty((pts.shape[0], self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                out[:, i, j] = self.entries[i][j].evaluate(pts) if self.entries[i][j] \
                    else 0.0
        return out

    def is_diagonal(self):
        return all(not self.entries[i][j] for i in range(self.dim)
                   for j in range(self.dim) if i != j)


def _eval_poly(p: GradedFunction, y):
    total = 0
    for (alpha, q, _), c in p.expand_radial().items():
        val = c
        for yj, a in zip(y, alpha):
            if a:
                val = val * yj ** a
        total = total + val
    return total


def _identity_entries(dim, diag):
    zero = GradedFunction.zero(dim)
    return tuple(tuple(diag[i] if i == j else zero for j in range(dim)) for i in range(dim))


PRESETS = ("identity", "anisotropic-linear", "diag-quadratic")


def preset(name, dim=2) -> CoefficientSpec:
    """Built-in coefficient fields.

    identity             K = I on the unit disk
    anisotropic-linear   K = (1 + x1) I on the box [-1/2, 1/2]^n (1 + x1 vanishes
                         on the unit disk boundary)
    diag-quadratic       K = diag(1 + x1^2, 1, ..., 1) on the unit disk
    """
    one = GradedFunction.constant(dim)
    x1 = GradedFunction.variable(dim, 0)
    if name == "identity":
        return CoefficientSpec(dim, _identity_entries(dim, [one] * dim),
                               Domain.unit_disk(dim), (1.0, 1.0), name)
    if name == "anisotropic-linear":
        return CoefficientSpec(dim, _identity_entries(dim, [one + x1] * dim),
                               Domain.box((-0.5,) * dim, (0.5,) * dim), (0.5, 1.5), name)
    if name == "diag-quadratic":
        diag = [one + GradedFunction.monomial(dim, (2,) + (0,) * (dim - 1))] + [one] * (dim - 1)
        return CoefficientSpec(dim, _identity_entries(dim, diag),
                               Domain.unit_disk(dim), (1.0, 2.0), name)
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


def constant_spec(K0, domain, name="constant"):
    n = len(K0)
    ent = tuple(tuple(GradedFunction.constant(n, Fraction(K0[i][j])) for j in range(n))
                for i in range(n))
    lam = np.linalg.eigvalsh(np.array(K0, dtype=float))
    return CoefficientSpec(n, ent, domain, (float(lam[0]), float(lam[-1])), name)


# --------------------------------------------------------------------------
# Taylor split
# --------------------------------------------------------------------------

def shift_polynomial(p: GradedFunction, y) -> GradedFunction:
    """q(w) = p(y + w) as a polynomial in w."""
    n = p.dim
    out = {}
    for (beta, _, _), c in p.expand_radial().items():
        # prod_j (y_j + w_j)^beta_j
        parts = [{(): c}]
        for j, b in enumerate(beta):
            nxt = {}
            for gam, val in parts[-1].items():
                for g in range(b + 1):
                    coef = math.comb(b, g) * (y[j] ** (b - g) if b - g else 1)
                    if coef == 0:
                        continue
                    key = gam + (g,)
                    nxt[key] = nxt.get(key, 0) + val * coef
            parts.append(nxt)
        for gam, val in parts[-1].items():
            key = (gam, 0, 0)
            out[key] = out.get(key, 0) + val
    return GradedFunction(n, out)


@dataclass
class TaylorSplit:
    """K(x) = K(y) + sum_d K_d(x - y), each K_d homogeneous of degree d."""
    center: tuple
    frozen: list
    pieces: Dict[int, tuple]

    @property
    def degrees(self):
        return sorted(self.pieces)

    def in_u(self, T: Transform):
        """Pieces re-expressed in u = T (x - y)."""
        return {d: tuple(tuple(poly_x_to_u(e, T) for e in row) for row in mat)
                for d, mat in self.pieces.items()}


def taylor_split(spec: CoefficientSpec, y, order=None) -> TaylorSplit:
    """Exact homogeneous decomposition of K around y.

    Polynomial K is reproduced exactly once ``order`` reaches its degree;
    lower orders drop the tail (it is smooth of order ``order + 1``).
    """
    n = spec.dim
    order = spec.max_degree if order is None else order
    pieces = {}
    frozen = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            shifted = shift_polynomial(spec.entries[i][j], y)
            for d, part in shifted.split_by_degree().items():
                if d == 0:
                    frozen[i][j] = part.coeff((0,) * n)
                elif d <= order:
                    mat = pieces.setdefault(d, [[GradedFunction.zero(n)] * n for _ in range(n)])
                    mat[i][j] = part
    pieces = {d: tuple(tuple(row) for row in mat) for d, mat in sorted(pieces.items())}
    return TaylorSplit(tuple(y), frozen, pieces)


def _sum_pieces(pieces_u, n):
    total = [[GradedFunction.zero(n)] * n for _ in range(n)]
    for mat in pieces_u.values():
        for i in range(n):
            for j in range(n):
                total[i][j] = total[i][j] + mat[i][j]
    return total


def rhs_of(zeta: GradedFunction, pieces_u, T: Transform, max_degree=None):
    """div((K - K(y)) grad zeta) in u-coordinates.

    ``pieces_u`` maps degree -> n x n polynomial matrix (or is a single
    matrix). Returns (kept, smooth) where kept holds the terms of homogeneity
    degree <= max_degree and smooth says whether anything was routed away.
    """
    n = zeta.dim
    P = _sum_pieces(pieces_u, n) if isinstance(pieces_u, dict) else pieces_u
    grads = [derivative_in_x(j, zeta, T) for j in range(n)]
    out = GradedFunction.zero(n)
    for i in range(n):
        flux = GradedFunction.zero(n)
        for j in range(n):
            if P[i][j]:
                flux = flux + mul_poly(P[i][j], grads[j])
        if flux:
            out = out + derivative_in_x(i, flux, T)
    if max_degree is None:
        return out, False
    kept = out.filter(lambda t: t.degree <= max_degree)
    return kept, len(kept) != len(out)


def _tidy(f: GradedFunction) -> GradedFunction:
    f = f.canonical()
    if f.is_exact or not f:
        return f
    return f.chop(FLOAT_CHOP * max(f.max_abs(), 1.0))


# --------------------------------------------------------------------------
# expansion
# --------------------------------------------------------------------------

def phi_tag(n, i):
    """Space of Phi_i: E^{n+2+4(i-1)}_{5i} (odd n) or its F-analogue."""
    return SpaceTag(n, 2 * i - 1, i + 2, "E" if n % 2 else "F")


def _render_coeff(c, rational_scale, pi_power):
    if is_exact_scalar(c) and is_exact_scalar(rational_scale):
        v = Fraction(c) * Fraction(rational_scale)
        sign = "-" if v < 0 else ""
        v = abs(v)
        pi = "π" if pi_power == 1 else f"π^{pi_power}"
        if v.denominator == 1:
            return f"{sign}{v.numerator}/{pi}" if pi_power else f"{sign}{v.numerator}"
        return f"{sign}{v.numerator}/({v.denominator}{pi})"
    return f"{float(c) * float(rational_scale) / math.pi ** pi_power:.10g}"


def render_sum(f, rational_scale, pi_power):
    if not f:
        return "0"
    text = " + ".join(render_term(t, rational_scale, pi_power) for t in f)
    return text.replace("+ -", "- ")


_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _subscript(i):
    return str(i).translate(_SUB)


def render_term(term, rational_scale, pi_power):
    """Readable form like ``1/(4π) · x1 · log r``."""
    parts = [_render_coeff(term.coeff, rational_scale, pi_power)]
    for k, a in enumerate(term.alpha):
        if a:
            parts.append(f"x{k + 1}" if a == 1 else f"x{k + 1}^{a}")
    if term.radial_power:
        parts.append(f"r^{-term.radial_power}")
    if term.log_power:
        parts.append("log r")
    return " · ".join(parts)


@dataclass
class ExpansionResult:
    """Singular expansion at base point y.

    Functions named ``*_unit`` are in the unit normalization (kernel log|u| or
    |u|^(2-n)); multiply by ``scale`` for the actual values. ``polynomial_unit``
    collects the smooth polynomial pieces dropped from the Phi_i in even
    dimension; they are still part of ``expansion_unit`` (the function whose
    residual defines the remainder problem).
    """
    y: tuple
    l: int
    fundamental: FundamentalSolution
    phis_unit: Dict[int, GradedFunction]
    tags: Dict[int, SpaceTag]
    polynomial_unit: GradedFunction
    residual_unit: GradedFunction
    spec_name: str = "custom"
    iterations: int = 0
    smooth_routed: bool = False

    @property
    def dim(self):
        return self.fundamental.dim

    @property
    def transform(self) -> Transform:
        return self.fundamental.transform

    @property
    def exact(self):
        return all(f.is_exact for f in self.phis_unit.values()) and self.transform.exact

    @property
    def scale(self) -> float:
        return self.fundamental.scale

    @property
    def max_index(self):
        return self.dim + self.l - 1

    @property
    def phi0_unit(self):
        return self.fundamental.kernel

    @property
    def phi0(self):
        return self.phi0_unit.scale(self.scale)

    @property
    def phis(self) -> Dict[int, GradedFunction]:
        return {i: f.to_float().scale(self.scale) for i, f in self.phis_unit.items()}

    @property
    def singular_unit(self) -> GradedFunction:
        out = self.phi0_unit
        for f in self.phis_unit.values():
            out = out + f
        return out

    @property
    def expansion_unit(self) -> GradedFunction:
        return self.singular_unit + self.polynomial_unit

    @property
    def remainder_rhs(self) -> GradedFunction:
        """div(K grad S) for the full expansion S, in u-coordinates."""
        return self.residual_unit.to_float().scale(self.scale)

    @property
    def boundary_trace(self) -> GradedFunction:
        """-S in u-coordinates, the Dirichlet data of the remainder."""
        return self.expansion_unit.to_float().scale(-self.scale)

    def to_u(self, points):
        return self.transform.apply(points, [float(v) for v in self.y])

    def evaluate(self, points, part="singular"):
        """Values at x-points of ``phi0``, ``singular``, ``expansion``,
        ``polynomial``, ``rhs`` or a Phi index."""
        u = self.to_u(points)
        if part == "phi0":
            f = self.phi0_unit
        elif part == "singular":
            f = self.singular_unit
        elif part == "expansion":
            f = self.expansion_unit
        elif part == "polynomial":
            f = self.polynomial_unit
        elif part == "rhs":
            f = self.residual_unit
        elif isinstance(part, int):
            f = self.phis_unit.get(part, GradedFunction.zero(self.dim))
        else:
            raise ValueError(f"unknown part {part!r}")
        return f.evaluate(u) * self.scale

    def evaluate_truncated(self, points, max_degree):
        """Phi_0 plus the Phi_i of degree <= max_degree (singular parts only)."""
        u = self.to_u(points)
        f = self.phi0_unit
        for i, phi in self.phis_unit.items():
            if i + 2 - self.dim <= max_degree:
                f = f + phi
        return f.evaluate(u) * self.scale

    def residual_degrees(self, singular_only=False):
        f = self.residual_unit.singular_part() if singular_only else self.residual_unit
        return f.degrees()

    # -- text ---------------------------------------------------------------

    def listing(self):
        """Human-readable term listing grouped by Phi_i."""
        fs = self.fundamental
        rs, e = fs.rational_scale, fs.pi_power
        y = ", ".join(format_scalar(v) for v in self.y)
        lines = [f"expansion of G_K at y = ({y}), order l = {self.l}, n = {self.dim}",
                 f"Φ₀: {render_sum(self.phi0_unit, rs, e)}  (at u = T (x - y))"]
        for i in sorted(self.phis_unit):
            body = render_sum(self.phis_unit[i], rs, e)
            lines.append(f"Φ{_subscript(i)} [{_tag_text(self.tags[i])}]: {body}")
        if self.polynomial_unit:
            lines.append("smooth polynomial part: " + render_sum(self.polynomial_unit, rs, e))
        degs = self.residual_degrees()
        lines.append("remainder rhs degrees: " + (", ".join(map(str, degs)) if degs else "none"))
        return "\n".join(lines)

    def to_dict(self):
        fs = self.fundamental
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "expansion",
            "spec": self.spec_name,
            "dimension": self.dim,
            "order": self.l,
            "base_point": [_scalar_text(v) for v in self.y],
            "exact": self.exact,
            "transform": [[_scalar_text(v) for v in row] for row in self.transform.entries],
            "scale": {"rational": _scalar_text(fs.rational_scale), "pi_power": fs.pi_power,
                      "value": repr(fs.scale)},
            "phi0": _terms_dict(self.phi0_unit, fs, 0),
            "phis": [{"index": i, "tag": _tag_text(self.tags[i]),
                      "terms": _terms_dict(self.phis_unit[i], fs, i)}
                     for i in sorted(self.phis_unit)],
            "polynomial_part": _terms_dict(self.polynomial_unit, fs, None),
            "remainder_rhs": _terms_dict(self.residual_unit, fs, None),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def _scalar_text(v):
    return format_scalar(v) if is_exact_scalar(v) else repr(float(v))


def _tag_text(tag):
    return f"{tag.family}(n={tag.n}, m={tag.m}, k={tag.k})"


def _terms_dict(f, fs, group):
    out = []
    for t in f:
        entry = {"coeff": repr(float(t.coeff) * fs.scale), "alpha": list(t.alpha),
                 "radial_power": t.radial_power, "log_power": t.log_power, "group": group}
        if is_exact_scalar(t.coeff) and is_exact_scalar(fs.rational_scale):
            entry["coeff_exact"] = {"rational": format_scalar(Fraction(t.coeff) * fs.rational_scale),
                                    "pi_power": fs.pi_power}
        out.append(entry)
    return out


def _coerce_point(y, exact):
    vals = []
    for v in y:
        if exact:
            # decimal text of a float, so 0.3 becomes 3/10
            if isinstance(v, (float, np.floating)):
                vals.append(Fraction(repr(float(v))))
            elif isinstance(v, np.integer):
                vals.append(Fraction(int(v)))
            else:
                vals.append(Fraction(v))
        else:
            vals.append(float(v))
    return tuple(vals)


def build_expansion(spec: CoefficientSpec, y, l: int, backend="auto",
                    max_iterations=None) -> ExpansionResult:
    """Run the parametrix recursion to homogeneity order l.

    Produces Phi_1 .. Phi_(n+l-1) so that the remaining right-hand side has
    homogeneity degree >= l. ``backend`` is "exact", "float" or "auto" (exact
    whenever K(y)^(-1/2) is rational).
    """
    if l < 0:
        raise ValueError("order l must be >= 0")
    n = spec.dim
    if len(y) != n:
        raise ValueError(f"base point has {len(y)} coordinates, expected {n}")
    exact = backend in ("exact", "auto")
    y = _coerce_point(y, exact)
    if not spec.domain.contains(np.array([[float(v) for v in y]]))[0]:
        raise ValueError(f"base point {tuple(float(v) for v in y)} is not inside the domain")
    K0 = spec.matrix_at(y)
    T = spd_sqrt_inverse(K0, spec.bounds)
    if not T.exact:
        if backend == "exact":
            raise ValueError("K(y)^(-1/2) is irrational; use the float backend")
        exact = False
    if not exact:
        T = T.to_float()
    fund = fundamental_frozen(T, n)
    pieces = taylor_split(spec, y).in_u(T)
    if not exact:
        pieces = {d: tuple(tuple(e.to_float() for e in row) for row in mat)
                  for d, mat in pieces.items()}
    P = _sum_pieces(pieces, n)

    zeta = fund.kernel if exact else fund.kernel.to_float()
    total = GradedFunction.zero(n)
    routed = False
    max_iterations = max_iterations or (n + l + 2)
    it = 0
    while True:
        rhs, cut = rhs_of(zeta, P, T, max_degree=l - 1)
        routed = routed or cut
        rhs = _tidy(rhs)
        if not rhs:
            break
        it += 1
        if it > max_iterations:
            raise GradingError("parametrix recursion did not terminate", iterations=it, l=l)
        zeta = _tidy(solve_graded(-rhs))
        total = total + zeta

    phis, tags = {}, {}
    poly = GradedFunction.zero(n)
    by_degree = total.split_by_degree()
    for i in range(1, n + l):
        piece = by_degree.pop(i + 2 - n, GradedFunction.zero(n))
        if n % 2 == 0:
            poly = poly + piece.polynomial_part()
            piece = piece.singular_part()
        tag = phi_tag(n, i)
        if piece and not classify(piece, tag):
            raise GradingError("Phi outside its space", i=i, tag=tag)
        if piece:
            phis[i], tags[i] = piece, tag
    if by_degree:
        raise GradingError("recursion produced unexpected degrees", degrees=sorted(by_degree))

    S = fund.kernel + total
    if not exact:
        S = S.to_float()
    residual = laplacian(S) + rhs_of(S, P, T)[0]
    residual = _tidy(residual)
    return ExpansionResult(y, l, fund, phis, tags, poly, residual, spec.name, it, routed)


def robin_terms(result: ExpansionResult):
    """Phi_i with n - 1 <= i <= n + l - 2; each must vanish at u = 0."""
    if result.l < 1:
        raise ValueError("Robin terms need an expansion of order l >= 1")
    out = {}
    for i, phi in result.phis_unit.items():
        # the extra top-order Phi (index n + l - 1) is not part of the listed range
        if i < result.dim - 1 or i > result.dim + result.l - 2:
            continue
        for t in phi:
            if t.degree <= 0:
                raise GradingError("Phi term does not vanish at the base point", i=i,
                                   term=t.render())
        if phi:
            out[i] = phi
    return out


# --------------------------------------------------------------------------
# remainder problem
# --------------------------------------------------------------------------

@dataclass
class RemainderProblem:
    """L_K H = rhs in the domain, H = trace on the boundary.

    H here is G - S with S the full symbolic expansion (polynomial pieces
    included); the regular part H^l is H + polynomial part.
    """
    spec: CoefficientSpec
    expansion: ExpansionResult

    @property
    def y(self):
        return tuple(float(v) for v in self.expansion.y)

    @property
    def l(self):
        return self.expansion.l

    def rhs(self, points):
        return self.expansion.evaluate(points, "rhs")

    def trace(self, points):
        return -self.expansion.evaluate(points, "expansion")

    def polynomial(self, points):
        return self.expansion.evaluate(points, "polynomial")


def remainder_problem(spec, y, l, backend="auto") -> RemainderProblem:
    return RemainderProblem(spec, build_expansion(spec, y, l, backend))
