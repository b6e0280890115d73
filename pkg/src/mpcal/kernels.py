"""Backend dispatch for the hot per-frequency kernels.

Two interchangeable implementations exist: numba-jitted loops
(:mod:`mpcal._kernels_nb`) and vectorized numpy (:mod:`mpcal._kernels_np`).
The active one is chosen once at import from the ``MPCAL_BACKEND``
environment variable:

    MPCAL_BACKEND=auto    use numba when importable, else numpy (default)
    MPCAL_BACKEND=numba   require numba
    MPCAL_BACKEND=numpy   force the pure-numpy path

``set_backend`` switches at runtime (used by the benchmark and the
backend-equivalence tests).  Both paths implement identical contracts; see
``benchmarks/bench_kernels.py`` for a speed comparison.
"""

import os

from . import _kernels_np

_IMPL = None
_NAME = ""


def _load(name: str):
    if name == "numpy":
        return _kernels_np, "numpy"
    try:
        from . import _kernels_nb
    except ImportError:
        if name == "numba":
            raise RuntimeError("MPCAL_BACKEND=numba but numba is not importable")
        return _kernels_np, "numpy"
    threads = int(os.environ.get("MPCAL_THREADS", "0"))
    if threads > 0:
        import numba
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
    return _kernels_nb, "numba"


def set_backend(name: str) -> str:
    """Select the kernel backend ("auto", "numba" or "numpy"). Returns the active name."""
    global _IMPL, _NAME
    if name not in ("auto", "numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    _IMPL, _NAME = _load(name)
    return _NAME


def active_backend() -> str:
    return _NAME


set_backend(os.environ.get("MPCAL_BACKEND", "auto"))


def cascade2(a, b):
    return _IMPL.cascade2(a, b)


def solve_small(a, b):
    return _IMPL.solve_small(a, b)


def track_root_signs(phase, target0, ambig_threshold):
    return _IMPL.track_root_signs(phase, target0, ambig_threshold)
