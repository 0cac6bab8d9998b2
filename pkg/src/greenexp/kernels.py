"""
Hot numeric kernels, each in a numba loop form and a vectorized numpy form.

The public names (``eval_terms``, ``assemble_flux_stencil``) are bound to the
numba form unless ``GREENEXP_DISABLE_NUMBA`` is set. Both forms are kept
importable so tests and ``benchmarks/bench_kernels.py`` can compare them.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

# stencil directions: +x, -x, +y, -y
DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1))


# --------------------------------------------------------------------------
# graded-term evaluation: sum_t c_t u^alpha_t r^(-p_t) (log r)^(s_t)
# --------------------------------------------------------------------------

def eval_terms_numpy(coeffs, alphas, powers, logs, points):
    points = np.ascontiguousarray(points, dtype=np.float64)
    npts = points.shape[0]
    out = np.zeros(npts)
    if coeffs.shape[0] == 0:
        return out
    r2 = np.einsum("ij,ij->i", points, points)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.sqrt(r2)
        logr = 0.5 * np.log(r2)
        for t in range(coeffs.shape[0]):
            val = np.full(npts, coeffs[t])
            for k in range(points.shape[1]):
                a = alphas[t, k]
                if a:
                    val *= points[:, k] ** a
            p = powers[t]
            if p:
                val *= r ** (-float(p))
            if logs[t]:
                val *= logr
            out += val
    return out


@njit(cache=True)
def eval_terms_numba(coeffs, alphas, powers, logs, points):
    npts = points.shape[0]
    dim = points.shape[1]
    nterms = coeffs.shape[0]
    out = np.zeros(npts)
    for i in range(npts):
        r2 = 0.0
        for k in range(dim):
            r2 += points[i, k] * points[i, k]
        r = np.sqrt(r2)
        # log r only when some term needs it
        logr = 0.0
        for t in range(nterms):
            if logs[t]:
                logr = 0.5 * np.log(r2)
                break
        acc = 0.0
        for t in range(nterms):
            val = coeffs[t]
            for k in range(dim):
                a = alphas[t, k]
                x = points[i, k]
                while a > 0:
                    val *= x
                    a -= 1
            p = powers[t]
            if p != 0:
                val *= r ** (-float(p))
            if logs[t]:
                val *= logr
            acc += val
        out[i] = acc
    return out


# --------------------------------------------------------------------------
# flux-form 5-point stencil with cut-cell Dirichlet arms
# --------------------------------------------------------------------------

def assemble_flux_stencil_numpy(index, kface, theta, h):
    """COO triplets of the SPD operator plus per-direction Dirichlet weights.

    ``index`` is (ny, nx) with -1 off the unknown set, ``kface`` and ``theta``
    are (4, ny, nx). Returns rows, cols, vals, bcw where ``bcw[d, m]`` is the
    weight of the Dirichlet value in direction d for unknown m (0 when the
    neighbour is an unknown).
    """
    ny, nx = index.shape
    mask = index >= 0
    nunk = int(mask.sum())
    idx = index[mask]
    inv_h2 = 1.0 / (h * h)
    w = kface / theta * inv_h2
    diag = np.zeros(nunk)
    diag[idx] = w[:, mask].sum(axis=0)
    rows = [idx]
    cols = [idx]
    vals = [diag[idx]]
    bcw = np.zeros((4, nunk))
    padded = np.full((ny + 2, nx + 2), -1, dtype=index.dtype)
    padded[1:-1, 1:-1] = index
    for d, (dx, dy) in enumerate(DIRECTIONS):
        nb = padded[1 + dy:ny + 1 + dy, 1 + dx:nx + 1 + dx]
        inner = mask & (nb >= 0)
        rows.append(index[inner])
        cols.append(nb[inner])
        vals.append(-kface[d][inner] * inv_h2)
        outer = mask & (nb < 0)
        bcw[d, index[outer]] = w[d][outer]
    return (np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), bcw)


@njit(cache=True)
def assemble_flux_stencil_numba(index, kface, theta, h):
    ny, nx = index.shape
    nunk = 0
    for j in range(ny):
        for i in range(nx):
            if index[j, i] >= 0:
                nunk += 1
    cap = 5 * nunk
    rows = np.empty(cap, dtype=np.int64)
    cols = np.empty(cap, dtype=np.int64)
    vals = np.empty(cap)
    bcw = np.zeros((4, nunk))
    inv_h2 = 1.0 / (h * h)
    dxs = (1, -1, 0, 0)
    dys = (0, 0, 1, -1)
    nnz = 0
    for j in range(ny):
        for i in range(nx):
            m = index[j, i]
            if m < 0:
                continue
            diag = 0.0
            for d in range(4):
                wd = kface[d, j, i] / theta[d, j, i] * inv_h2
                diag += wd
                jj = j + dys[d]
                ii = i + dxs[d]
                nb = -1
                if 0 <= jj < ny and 0 <= ii < nx:
                    nb = index[jj, ii]
                if nb >= 0:
                    rows[nnz] = m
                    cols[nnz] = nb
                    vals[nnz] = -kface[d, j, i] * inv_h2
                    nnz += 1
                else:
                    bcw[d, m] = wd
            rows[nnz] = m
            cols[nnz] = m
            vals[nnz] = diag
            nnz += 1
    return rows[:nnz], cols[:nnz], vals[:nnz], bcw


if USE_NUMBA:
    eval_terms = eval_terms_numba
    assemble_flux_stencil = assemble_flux_stencil_numba
else:
    eval_terms = eval_terms_numpy
    assemble_flux_stencil = assemble_flux_stencil_numpy
