import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.sparse as sp

from greenexp import kernels
from greenexp._accel import HAVE_NUMBA
from greenexp.numeric import Grid, _face_coefficients
from greenexp.parametrix import build_expansion, preset

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


@needs_numba
def test_eval_terms_paths_agree():
    res = build_expansion(preset("anisotropic-linear"), (0, 0), 3)
    packed = res.expansion_unit.packed()
    pts = np.random.default_rng(0).uniform(-0.5, 0.5, size=(2000, 2))
    a = kernels.eval_terms_numpy(*packed, pts)
    b = kernels.eval_terms_numba(*packed, pts)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-15)


@needs_numba
def test_eval_terms_paths_agree_at_origin():
    res = build_expansion(preset("anisotropic-linear", 3), (0, 0, 0), 1)
    packed = res.expansion_unit.packed()
    pts = np.zeros((1, 3))
    with np.errstate(all="ignore"):
        a = kernels.eval_terms_numpy(*packed, pts)
    b = kernels.eval_terms_numba(*packed, pts)
    assert np.array_equal(np.isnan(a), np.isnan(b))
    assert np.array_equal(a[np.isfinite(a)], b[np.isfinite(b)])


@needs_numba
def test_stencil_paths_agree():
    spec = preset("diag-quadratic")
    grid = Grid.for_domain(spec.domain, 65)
    args = (grid.index, np.ascontiguousarray(_face_coefficients(spec, grid)),
            np.ascontiguousarray(grid.theta), grid.h)
    a = kernels.assemble_flux_stencil_numpy(*args)
    b = kernels.assemble_flux_stencil_numba(*args)
    n = grid.n_unknowns
    A = sp.csr_matrix((a[2], (a[0], a[1])), shape=(n, n))
    B = sp.csr_matrix((b[2], (b[0], b[1])), shape=(n, n))
    assert abs(A - B).max() == 0
    assert np.array_equal(a[3], b[3])


def test_env_flag_selects_numpy():
    code = ("from greenexp import kernels, _accel;"
            "print(_accel.USE_NUMBA, kernels.eval_terms.__name__)")
    env = dict(os.environ, GREENEXP_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out == ["False", "eval_terms_numpy"]


def test_numpy_path_end_to_end():
    code = ("from greenexp.numeric import Grid, green_reconstruct;"
            "from greenexp.parametrix import preset;"
            "s = preset('identity'); g = Grid.for_domain(s.domain, 65);"
            "G, r, _ = green_reconstruct(s, (0, 0), 1, g);"
            "print(repr(G.at((0.5, 0.0))))")
    vals = []
    for flag in ("1", "0"):
        env = dict(os.environ, GREENEXP_DISABLE_NUMBA=flag)
        vals.append(float(subprocess.run([sys.executable, "-c", code], env=env,
                                         capture_output=True, text=True, check=True).stdout))
    assert vals[0] == pytest.approx(vals[1], rel=1e-10)
