"""
Numba vs numpy timings for the two hot kernels.

    python3 benchmarks/bench_kernels.py [--nodes 513] [--points 200000] [--repeat 5]

Both paths are called directly (the GREENEXP_DISABLE_NUMBA flag only picks
the default binding), so one run compares them side by side. The first numba
call is timed separately as compile/cache-load time.
"""
import argparse
import time

import numpy as np

from greenexp import kernels
from greenexp._accel import HAVE_NUMBA
from greenexp.numeric import Grid, _face_coefficients
from greenexp.parametrix import build_expansion, preset


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_eval(npoints, repeat, rng):
    spec = preset("anisotropic-linear")
    res = build_expansion(spec, (0, 0), 3)
    f = res.expansion_unit
    packed = f.packed()
    pts = rng.uniform(-0.5, 0.5, size=(npoints, 2))
    t_np, v_np = best_of(lambda: kernels.eval_terms_numpy(*packed, pts), repeat)
    row = {"kernel": "eval_terms", "size": f"{npoints} pts x {len(packed[0])} terms",
           "numpy": t_np}
    if HAVE_NUMBA:
        t0 = time.perf_counter()
        kernels.eval_terms_numba(*packed, pts[:10])
        row["compile"] = time.perf_counter() - t0
        t_nb, v_nb = best_of(lambda: kernels.eval_terms_numba(*packed, pts), repeat)
        row["numba"] = t_nb
        ok = np.isfinite(v_np)
        row["max_diff"] = float(np.max(np.abs(v_np[ok] - v_nb[ok]) / (1 + np.abs(v_np[ok]))))
    return row


def bench_stencil(nodes, repeat):
    spec = preset("diag-quadratic")
    grid = Grid.for_domain(spec.domain, nodes)
    kface = np.ascontiguousarray(_face_coefficients(spec, grid))
    theta = np.ascontiguousarray(grid.theta)
    args = (grid.index, kface, theta, grid.h)
    t_np, a = best_of(lambda: kernels.assemble_flux_stencil_numpy(*args), repeat)
    row = {"kernel": "assemble_flux_stencil", "size": f"{nodes}^2 grid, "
           f"{grid.n_unknowns} unknowns", "numpy": t_np}
    if HAVE_NUMBA:
        t0 = time.perf_counter()
        kernels.assemble_flux_stencil_numba(*args)
        row["compile"] = time.perf_counter() - t0
        t_nb, b = best_of(lambda: kernels.assemble_flux_stencil_numba(*args), repeat)
        row["numba"] = t_nb
        # compare as sparse matrices: triplet order differs between the paths
        import scipy.sparse as sp
        n = grid.n_unknowns
        A = sp.csr_matrix((a[2], (a[0], a[1])), shape=(n, n))
        B = sp.csr_matrix((b[2], (b[0], b[1])), shape=(n, n))
        row["max_diff"] = float(max(abs(A - B).max(), np.abs(a[3] - b[3]).max()))
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--nodes", type=int, default=513)
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    if not HAVE_NUMBA:
        print("numba not importable; timing the numpy path only")
    rows = [bench_eval(args.points, args.repeat, rng), bench_stencil(args.nodes, args.repeat)]
    print(f"{'kernel':<24}{'size':<34}{'numpy s':>10}{'numba s':>10}{'speedup':>9}"
          f"{'jit s':>8}{'max diff':>11}")
    for r in rows:
        nb = r.get("numba")
        speed = f"{r['numpy'] / nb:8.1f}x" if nb else "      -  "
        print(f"{r['kernel']:<24}{r['size']:<34}{r['numpy']:10.4f}"
              f"{nb if nb is not None else float('nan'):10.4f}{speed}"
              f"{r.get('compile', float('nan')):8.2f}{r.get('max_diff', float('nan')):11.2e}")


if __name__ == "__main__":
    main()
