"""
greenexp: singular expansions of Green's functions for -div(K grad).

Exact graded-term algebra (``symbolic``), the Laplace inverse on graded
spaces (``inverse``), the frozen-coefficient change of variables
(``transform``), the parametrix recursion (``parametrix``) and a
finite-difference verifier (``numeric``). Set GREENEXP_DISABLE_NUMBA=1 to
force the pure-numpy kernels.
"""
from .symbolic import GradedFunction, GradedTerm, SpaceTag, GradingError, classify, laplacian, partial
from .inverse import UntaggableError, solve_graded, infer_tag
from .transform import NotSPDError, Transform, spd_sqrt_inverse, fundamental_frozen
from .parametrix import (CoefficientSpec, Domain, ExpansionResult, RemainderProblem,
                         build_expansion, preset, robin_terms, taylor_split)
from .config import ConfigError, load_spec, parse_config, serialize_spec

__version__ = "0.1.0"

__all__ = [
    "GradedFunction", "GradedTerm", "SpaceTag", "GradingError", "classify", "laplacian",
    "partial", "UntaggableError", "solve_graded", "infer_tag", "NotSPDError", "Transform",
    "spd_sqrt_inverse", "fundamental_frozen", "CoefficientSpec", "Domain", "ExpansionResult",
    "RemainderProblem", "build_expansion", "preset", "robin_terms", "taylor_split",
    "ConfigError", "load_spec", "parse_config", "serialize_spec",
]
