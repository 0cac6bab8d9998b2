"""
Finite-difference ground truth for the expansion (two dimensions).

The operator -div(K grad) with diagonal K is discretized by a 5-point flux
scheme: face coefficients are arithmetic means of the two node values, and an
arm that leaves the domain ends at the boundary intersection (fraction theta of
h) where the Dirichlet value is imposed.

Two boundary closures are available. ``symmetric`` keeps the spacing h in the
outer difference, which gives an SPD matrix (solved by CG) but only first-order
accurate gradients next to a curved boundary. ``shortley-weller`` (default)
uses the true arm lengths, (theta_+ + theta_-) h / 2, which restores
second-order accuracy of the solution and its gradient at the price of a
nonsymmetric matrix in the boundary rows (solved by restarted GMRES). Both use a
smoothed-aggregation AMG preconditioner from pyamg.
"""
from __future__ import annotations

import json
import logging
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import pyamg
import scipy.sparse as sp
from scipy.sparse.linalg import cg, gmres

from . import kernels
from .parametrix import (
    CoefficientSpec,
    Domain,
    RemainderProblem,
    build_expansion,
    constant_spec,
    preset,
)
from .transform import spd_sqrt_inverse

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
THETA_MIN = 1e-3
DEFAULT_TOL = 1e-10
PRECOND_SEED = 20240101
SCHEMES = ("shortley-weller", "symmetric")


# --------------------------------------------------------------------------
# grids and fields
# --------------------------------------------------------------------------

class Grid:
    """Uniform node lattice over the domain's bounding box.

    Unknowns are the nodes strictly inside the domain. ``theta[d]`` is the
    fraction of h from a node to the boundary along direction d (1 when the
    neighbour is an unknown).
    """

    def __init__(self, domain: Domain, h: float, lo=None, shape=None):
        if domain.dim != 2:
            raise NotImplementedError("numeric verification is implemented for n = 2 only")
        self.domain = domain
        self.h = float(h)
        self.lo = np.asarray(lo if lo is not None else domain.lo, dtype=float)
        if shape is None:
            ext = np.asarray(domain.hi) - self.lo
            nx, ny = (int(round(e / self.h)) + 1 for e in ext)
            shape = (ny, nx)
        self.shape = tuple(shape)
        ny, nx = self.shape
        self.x = self.lo[0] + self.h * np.arange(nx)
        self.y = self.lo[1] + self.h * np.arange(ny)
        X, Y = np.meshgrid(self.x, self.y)
        self.points = np.stack([X, Y], axis=-1)
        dist = domain.distance_to_boundary(self.points.reshape(-1, 2)).reshape(self.shape)
        self.inside = dist > 1e-9 * self.h
        self.index = np.full(self.shape, -1, dtype=np.int64)
        self.index[self.inside] = np.arange(int(self.inside.sum()))
        self.theta, self.arm_points = self._arms()

    @classmethod
    def for_domain(cls, domain: Domain, nodes: int):
        """Grid with ``nodes`` points across the first axis of the bounding box."""
        if nodes < 3:
            raise ValueError("need at least 3 nodes per axis")
        h = (domain.hi[0] - domain.lo[0]) / (nodes - 1)
        return cls(domain, h)

    @property
    def n_unknowns(self):
        return int(self.inside.sum())

    @property
    def unknown_points(self):
        return self.points[self.inside]

    def _arms(self):
        ny, nx = self.shape
        theta = np.ones((4, ny, nx))
        arm_pts = np.empty((4, ny, nx, 2))
        P = self.points
        for d, (dx, dy) in enumerate(kernels.DIRECTIONS):
            step = np.array([dx, dy], dtype=float) * self.h
            nb_inside = np.zeros(self.shape, dtype=bool)
            sl_dst = (slice(max(0, -dy), ny - max(0, dy)), slice(max(0, -dx), nx - max(0, dx)))
            sl_src = (slice(max(0, dy), ny - max(0, -dy)), slice(max(0, dx), nx - max(0, -dx)))
            nb_inside[sl_dst] = self.inside[sl_src]
            t = np.ones(self.shape)
            cut = self.inside & ~nb_inside
            if cut.any():
                t[cut] = self._boundary_fraction(P[cut], step)
            t = np.clip(t, THETA_MIN, 1.0)
            theta[d] = t
            arm_pts[d] = P + t[..., None] * step
        return theta, arm_pts

    def _boundary_fraction(self, pts, step):
        dom = self.domain
        if dom.kind == "disk":
            # |p + t s|^2 = 1
            a = step @ step
            b = 2 * pts @ step
            c = (pts ** 2).sum(axis=1) - 1.0
            disc = np.sqrt(np.maximum(b * b - 4 * a * c, 0.0))
            return (-b + disc) / (2 * a)
        lo, hi = np.asarray(dom.lo), np.asarray(dom.hi)
        k = int(np.nonzero(step)[0][0])
        if step[k] > 0:
            return (hi[k] - pts[:, k]) / step[k]
        return (lo[k] - pts[:, k]) / step[k]

    def nearest_node(self, point):
        """(row, col) of the node closest to ``point``."""
        p = np.asarray(point, dtype=float)
        i = int(round((p[0] - self.lo[0]) / self.h))
        j = int(round((p[1] - self.lo[1]) / self.h))
        i = min(max(i, 0), self.shape[1] - 1)
        j = min(max(j, 0), self.shape[0] - 1)
        return j, i

    def node(self, row, col):
        return self.points[row, col].copy()

    def snap(self, point):
        return self.node(*self.nearest_node(point))


@dataclass
class GridField:
    """Values on the grid nodes (NaN outside the unknown set)."""
    grid: Grid
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def at(self, point):
        j, i = self.grid.nearest_node(point)
        return float(self.values[j, i])

    def sample(self, points):
        return np.array([self.at(p) for p in np.atleast_2d(points)])

    def finite_mask(self):
        return np.isfinite(self.values)

    def __sub__(self, other):
        return GridField(self.grid, self.values - other.values, dict(self.meta))

    def to_csv(self, path):
        m = self.finite_mask()
        pts = self.grid.points[m]
        data = np.column_stack([pts, self.values[m]])
        np.savetxt(path, data, delimiter=",", header="x,y,value", comments="", fmt="%.17g")

    def to_npz(self, path):
        g = self.grid
        np.savez(path, schema_version=SCHEMA_VERSION, shape=np.array(g.shape), h=g.h,
                 lo=g.lo, mask=g.inside, values=self.values,
                 meta=json.dumps(self.meta, sort_keys=True, default=str))

    @classmethod
    def from_npz(cls, path, domain: Domain):
        with np.load(path) as z:
            grid = Grid(domain, float(z["h"]), lo=z["lo"], shape=tuple(z["shape"]))
            return cls(grid, z["values"].copy(), json.loads(str(z["meta"])))


@dataclass
class SolveReport:
    iterations: int
    residual: float
    seconds: float
    converged: bool
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {"iterations": self.iterations, "residual": self.residual,
                "seconds": round(self.seconds, 4), "converged": self.converged,
                "warnings": list(self.warnings)}


# --------------------------------------------------------------------------
# assembly and solve
# --------------------------------------------------------------------------

class LinearSystem:
    """Assembled operator (SPD for the symmetric scheme) plus the Dirichlet couplings."""

    def __init__(self, spec, grid, matrix, bc_weights, symmetric=True):
        self.spec = spec
        self.grid = grid
        self.matrix = matrix
        self.bc_weights = bc_weights
        self.symmetric = symmetric
        self._precond = None

    def boundary_load(self, bc):
        """Right-hand-side contribution of Dirichlet data ``bc(points)``."""
        g = self.grid
        load = np.zeros(g.n_unknowns)
        idx = g.index[g.inside]
        for d in range(4):
            w = self.bc_weights[d]
            hit = w[idx] != 0
            if hit.any():
                pts = g.arm_points[d][g.inside][hit]
                load[idx[hit]] += w[idx[hit]] * bc(pts)
        return load

    @property
    def preconditioner(self):
        if self._precond is None:
            sym = "symmetric" if self.symmetric else "nonsymmetric"
            # pyamg's spectral-radius estimate draws from the global RNG;
            # pin it so repeated runs give byte-identical fields
            state = np.random.get_state()
            np.random.seed(PRECOND_SEED)
            try:
                ml = pyamg.smoothed_aggregation_solver(self.matrix, symmetry=sym)
            finally:
                np.random.set_state(state)
            self._precond = ml.aspreconditioner(cycle="V")
        return self._precond


def _face_coefficients(spec: CoefficientSpec, grid: Grid):
    n = spec.dim
    for i in range(n):
        for j in range(n):
            if i != j and spec.entries[i][j]:
                raise NotImplementedError("the flux scheme handles diagonal K only")
    P = grid.points[grid.inside]
    kface = np.ones((4,) + grid.shape)
    for d, (dx, dy) in enumerate(kernels.DIRECTIONS):
        axis = 0 if dx else 1
        entry = spec.entries[axis][axis]
        k_here = entry.evaluate(P)
        k_arm = entry.evaluate(grid.arm_points[d][grid.inside])
        if (k_here <= 0).any() or (k_arm <= 0).any():
            bad = P[np.argmin(k_here)]
            raise ValueError(f"K is not positive definite near node {tuple(bad)}")
        kface[d][grid.inside] = 0.5 * (k_here + k_arm)
    return kface


def assemble_operator(spec: CoefficientSpec, grid: Grid, scheme="shortley-weller") -> LinearSystem:
    """5-point flux discretization of -div(K grad) on the grid."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    kface = _face_coefficients(spec, grid)
    symmetric = scheme == "symmetric"
    if not symmetric:
        # each axis of a row scaled by 2 / (theta_+ + theta_-)
        th = grid.theta
        kface[0:2] *= 2.0 / (th[0] + th[1])
        kface[2:4] *= 2.0 / (th[2] + th[3])
    rows, cols, vals, bcw = kernels.assemble_flux_stencil(
        grid.index, np.ascontiguousarray(kface), np.ascontiguousarray(grid.theta), grid.h)
    n = grid.n_unknowns
    A = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    A.sum_duplicates()
    if not symmetric:
        symmetric = abs(A - A.T).max() == 0
    return LinearSystem(spec, grid, A, bcw, symmetric)


def solve_dirichlet(system: LinearSystem, rhs, bc=None, tol=DEFAULT_TOL, maxiter=2000):
    """Solve -div(K grad u) = rhs with u = bc on the boundary.

    ``rhs`` is a vector over the unknowns or a GridField; ``bc`` maps an
    (N, 2) array of boundary points to values (zero when omitted).
    """
    g = system.grid
    f = rhs.values[g.inside] if isinstance(rhs, GridField) else np.asarray(rhs, dtype=float)
    b = f.copy()
    if bc is not None:
        b += system.boundary_load(bc)
    t0 = time.perf_counter()
    count = [0]

    def tick(_):
        count[0] += 1

    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        sol = np.zeros_like(b)
        info = 0
    else:
        if system.symmetric:
            sol, info = cg(system.matrix, b, rtol=tol, atol=0.0, maxiter=maxiter,
                           M=system.preconditioner, callback=tick)
        else:
            sol, info = gmres(system.matrix, b, rtol=tol, atol=0.0, restart=50,
                              maxiter=maxiter, M=system.preconditioner, callback=tick,
                              callback_type="pr_norm")
    res = float(np.linalg.norm(b - system.matrix @ sol) / bnorm) if bnorm else 0.0
    report = SolveReport(count[0], res, time.perf_counter() - t0, info == 0)
    if info != 0:
        report.warnings.append(f"Krylov solve stopped after {count[0]} iterations, residual {res:.3e}")
        log.warning(report.warnings[-1])
    values = np.full(g.shape, np.nan)
    values[g.inside] = sol
    return GridField(g, values), report


# --------------------------------------------------------------------------
# Green's function pipelines
# --------------------------------------------------------------------------

def _check_base_point(grid, y):
    margin = 4 * grid.h
    if grid.domain.distance_to_boundary(np.asarray(y, dtype=float)[None])[0] < margin:
        raise ValueError(f"base point {tuple(y)} is closer than 4h = {margin:.4g} to the boundary")


def _neighbour_average(values, grid, j, i):
    acc = []
    for dx, dy in kernels.DIRECTIONS:
        jj, ii = j + dy, i + dx
        if 0 <= jj < grid.shape[0] and 0 <= ii < grid.shape[1] and grid.inside[jj, ii]:
            v = values[jj, ii]
            if np.isfinite(v):
                acc.append(v)
    return float(np.mean(acc)) if acc else 0.0


def remainder_solve(problem: RemainderProblem, grid: Grid, system=None, tol=DEFAULT_TOL,
                    rhs_cap=1e8):
    """Numeric H = G - S for the expansion S of ``problem``.

    The rhs is sampled pointwise; at the node nearest y (and at any node where
    it is not finite) it is replaced by the average of its neighbours.
    Returns (H field, report). Add ``problem.polynomial`` for the regular part.
    """
    y = problem.y
    _check_base_point(grid, y)
    system = system or assemble_operator(problem.spec, grid)
    rhs = np.full(grid.shape, np.nan)
    if problem.expansion.residual_unit:
        with np.errstate(all="ignore"):
            rhs[grid.inside] = problem.rhs(grid.unknown_points)
    else:
        rhs[grid.inside] = 0.0
    jy, iy = grid.nearest_node(y)
    rhs[jy, iy] = np.nan
    notes = []
    bad = grid.inside & ~np.isfinite(rhs)
    for j, i in zip(*np.nonzero(bad)):
        rhs[j, i] = _neighbour_average(rhs, grid, j, i)
    peak = float(np.nanmax(np.abs(rhs[grid.inside])))
    if peak > rhs_cap:
        notes.append(f"rhs magnitude {peak:.3e} exceeds cap {rhs_cap:.1e}; grid may be "
                     f"under-resolved near y")
        warnings.warn(notes[-1])
    field_, report = solve_dirichlet(system, rhs[grid.inside], problem.trace, tol=tol)
    report.warnings.extend(notes)
    field_.meta = {"kind": "remainder", "y": list(y), "l": problem.l}
    return field_, report


def regular_part(problem: RemainderProblem, H: GridField):
    """H^l = H + polynomial part of the expansion."""
    g = H.grid
    vals = H.values.copy()
    if problem.expansion.polynomial_unit:
        vals[g.inside] += problem.polynomial(g.unknown_points)
    return GridField(g, vals, dict(H.meta, kind="regular"))


def green_reconstruct(spec: CoefficientSpec, y, l, grid: Grid, mode="remainder",
                      system=None, tol=DEFAULT_TOL, backend="auto"):
    """Numeric G_K(., y) on the grid.

    ``mode="remainder"`` evaluates the expansion and adds the numeric
    remainder; ``mode="delta"`` solves against a unit load of weight 1/h^2 at
    the node nearest y. The value at that node is NaN in remainder mode.
    """
    system = system or assemble_operator(spec, grid)
    if mode == "delta":
        jy, iy = grid.nearest_node(y)
        if not grid.inside[jy, iy]:
            raise ValueError("base point is not at an interior node")
        b = np.zeros(grid.n_unknowns)
        b[grid.index[jy, iy]] = 1.0 / grid.h ** 2
        G, report = solve_dirichlet(system, b, None, tol=tol)
        G.meta = {"kind": "green-delta", "y": list(map(float, y))}
        return G, report, None
    if mode != "remainder":
        raise ValueError(f"unknown mode {mode!r}")
    problem = RemainderProblem(spec, build_expansion(spec, y, l, backend))
    H, report = remainder_solve(problem, grid, system, tol)
    vals = H.values.copy()
    with np.errstate(all="ignore"):
        vals[grid.inside] += problem.expansion.evaluate(grid.unknown_points, "expansion")
    jy, iy = grid.nearest_node(problem.y)
    vals[jy, iy] = np.nan
    G = GridField(grid, vals, {"kind": "green", "y": list(problem.y), "l": l})
    return G, report, problem


# --------------------------------------------------------------------------
# oracles
# --------------------------------------------------------------------------

def images_disk_oracle(y, x):
    """Green's function of -Laplace on the unit disk (method of images).

    Accepts single points or (N, 2) arrays for x.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    d = np.linalg.norm(x - y, axis=1)
    if np.any(d == 0):
        raise ValueError("images oracle is singular at x = y")
    ny = np.linalg.norm(y)
    if ny == 0:
        val = -np.log(d) / (2 * np.pi)
    else:
        ystar = y / ny ** 2
        val = -(np.log(d) - np.log(ny * np.linalg.norm(x - ystar, axis=1))) / (2 * np.pi)
    return float(val[0]) if single else val


def disk_robin_oracle(y):
    """Classical Robin function -(1/2pi) log(1 - |y|^2) of the unit disk."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    return -np.log(1.0 - (y ** 2).sum(axis=1)) / (2 * np.pi)


@dataclass
class ConstantKReport:
    direct: GridField
    transformed: GridField
    discrepancy: float
    det_factor: float

    def to_dict(self):
        return {"discrepancy": self.discrepancy, "det_factor": self.det_factor}


def constant_K_oracle(K0, y, grid: Grid, tol=DEFAULT_TOL, exclusion=4):
    """G_{K0} on a box two ways: direct solve, and a Laplace solve on T0(box)
    pulled back with the det factor.

    K0 must be diagonal and the ratios of the entries of T0 = K0^(-1/2) must
    be integers, so the transformed grid contains the images of the nodes.
    Discrepancy is the max difference over nodes farther than
    ``exclusion * h`` from y.
    """
    dom = grid.domain
    if dom.kind != "box":
        raise ValueError("constant-K oracle needs a box domain")
    T = spd_sqrt_inverse(K0)
    Tm = T.matrix
    if np.any(np.abs(Tm - np.diag(np.diag(Tm))) > 0):
        raise NotImplementedError("constant-K oracle needs diagonal K0")
    t = np.diag(Tm)
    tmin = t.min()
    ratio = t / tmin
    if np.any(np.abs(ratio - np.round(ratio)) > 1e-12):
        raise ValueError("T0 entries must have integer ratios for node alignment")
    ratio = np.round(ratio).astype(int)
    y = np.asarray(y, dtype=float)

    spec = constant_spec(K0, dom, "constant")
    G_direct, _, _ = green_reconstruct(spec, y, 0, grid, tol=tol)

    tdom = Domain.box(t * np.asarray(dom.lo), t * np.asarray(dom.hi))
    tgrid = Grid(tdom, grid.h * tmin)
    lap = preset("identity")
    lap = CoefficientSpec(2, lap.entries, tdom, (1.0, 1.0), "identity")
    G_lap, _, _ = green_reconstruct(lap, t * y, 0, tgrid, tol=tol)

    det = float(T.det_factor)
    pulled = np.full(grid.shape, np.nan)
    ny_, nx_ = grid.shape
    pulled[:, :] = det * G_lap.values[::ratio[1], ::ratio[0]][:ny_, :nx_]
    pulled[~grid.inside] = np.nan
    G_pull = GridField(grid, pulled, {"kind": "green-pullback"})

    dist = np.linalg.norm(grid.points - y, axis=-1)
    m = grid.inside & (dist > exclusion * grid.h)
    disc = float(np.nanmax(np.abs(G_direct.values[m] - pulled[m])))
    return ConstantKReport(G_direct, G_pull, disc, det)


# --------------------------------------------------------------------------
# Robin function and smoothness probes
# --------------------------------------------------------------------------

@dataclass
class RobinTable:
    """R_K on a tensor lattice (NaN where a lattice point is skipped).

    ``values`` follow R_K(y) = H^l(y, y) with H^l = G - singular expansion;
    ``classical`` is -R_K, the sign convention of -(1/2pi) log(1 - |y|^2).
    """
    xs: np.ndarray
    ys: np.ndarray
    points: np.ndarray
    values: np.ndarray
    reports: list

    @property
    def classical(self):
        return -self.values

    def second_differences(self):
        """Centered second differences along each lattice axis."""
        hx = self.xs[1] - self.xs[0]
        hy = self.ys[1] - self.ys[0]
        v = self.values
        d2x = (v[:, 2:] - 2 * v[:, 1:-1] + v[:, :-2]) / hx ** 2
        d2y = (v[2:, :] - 2 * v[1:-1, :] + v[:-2, :]) / hy ** 2
        return d2x, d2y

    def first_differences(self):
        hx = self.xs[1] - self.xs[0]
        hy = self.ys[1] - self.ys[0]
        v = self.values
        return (v[:, 2:] - v[:, :-2]) / (2 * hx), (v[2:, :] - v[:-2, :]) / (2 * hy)

    def to_rows(self):
        rows = []
        for j in range(len(self.ys)):
            for i in range(len(self.xs)):
                if np.isfinite(self.values[j, i]):
                    p = self.points[j, i]
                    rows.append((float(p[0]), float(p[1]), float(self.values[j, i])))
        return rows


def robin_scan(spec: CoefficientSpec, l, xs, ys, grid: Grid, keep=None, tol=DEFAULT_TOL,
               backend="auto"):
    """R_K(y) = H^l(y, y) over the lattice xs x ys.

    Each lattice point is snapped to its nearest grid node (the snapped points
    are returned). ``keep(point) -> bool`` filters lattice points; points
    closer than 4h to the boundary are skipped.
    """
    if l < 1:
        raise ValueError("robin_scan needs l >= 1 so the vanishing Phi_i separate")
    system = assemble_operator(spec, grid)
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    values = np.full((len(ys), len(xs)), np.nan)
    points = np.full((len(ys), len(xs), 2), np.nan)
    reports = []
    for j, yv in enumerate(ys):
        for i, xv in enumerate(xs):
            p = grid.snap((xv, yv))
            if keep is not None and not keep(np.array([xv, yv])):
                continue
            if grid.domain.distance_to_boundary(p[None])[0] < 4 * grid.h:
                continue
            problem = RemainderProblem(spec, build_expansion(spec, tuple(p), l, backend))
            H, rep = remainder_solve(problem, grid, system, tol)
            jy, iy = grid.nearest_node(p)
            values[j, i] = H.values[jy, iy] + float(problem.polynomial(p[None])[0])
            points[j, i] = p
            reports.append(rep)
    return RobinTable(xs, ys, points, values, reports)


@dataclass
class ProbeReport:
    radii: list
    oscillation: list
    gradient: list
    hessian: list

    @property
    def monotone(self):
        osc = self.oscillation
        return all(a >= b for a, b in zip(osc, osc[1:]))

    def to_dict(self):
        return {"radii": self.radii, "oscillation": self.oscillation,
                "gradient": self.gradient, "hessian": self.hessian,
                "monotone": self.monotone}


def oscillation(field_: GridField, center, radius):
    """max - min of the finite values with 0 < |x - center| <= radius."""
    g = field_.grid
    dist = np.linalg.norm(g.points - np.asarray(center, dtype=float), axis=-1)
    m = (dist > 1e-12 * g.h) & (dist <= radius + 1e-12) & np.isfinite(field_.values)
    vals = field_.values[m]
    return float(vals.max() - vals.min()) if vals.size else 0.0


def smoothness_probe(field_: GridField, center, radii):
    """Oscillation over punctured balls and difference magnitudes on annuli.

    radii are probed largest first; the gradient/Hessian entries are maxima
    over the annulus (r/2, r].
    """
    g = field_.grid
    radii = sorted((float(r) for r in radii), reverse=True)
    v = field_.values
    gy, gx = np.gradient(v, g.h)
    gyy, gyx = np.gradient(gy, g.h)
    gxy, gxx = np.gradient(gx, g.h)
    grad = np.hypot(gx, gy)
    hess = np.sqrt(gxx ** 2 + gyy ** 2 + gxy ** 2 + gyx ** 2)
    dist = np.linalg.norm(g.points - np.asarray(center, dtype=float), axis=-1)
    osc, gmax, hmax = [], [], []
    for r in radii:
        osc.append(oscillation(field_, center, r))
        ring = (dist > r / 2) & (dist <= r + 1e-12)
        gr = grad[ring & np.isfinite(grad)]
        hr = hess[ring & np.isfinite(hess)]
        gmax.append(float(gr.max()) if gr.size else 0.0)
        hmax.append(float(hr.max()) if hr.size else 0.0)
    return ProbeReport(radii, osc, gmax, hmax)


def manufactured_residual(spec: CoefficientSpec, grid: Grid, u, div_flux):
    """Max-norm error of the discrete solve for a manufactured solution.

    ``u(points)`` is the exact solution, ``div_flux(points)`` the value of
    -div(K grad u). Returns (max error, report).
    """
    system = assemble_operator(spec, grid)
    f = div_flux(grid.unknown_points)
    sol, rep = solve_dirichlet(system, f, u)
    err = np.abs(sol.values[grid.inside] - u(grid.unknown_points))
    return float(err.max()), rep
