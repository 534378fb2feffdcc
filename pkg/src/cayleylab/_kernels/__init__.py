"""Hot-kernel dispatch: compiled Cython core with a numpy fallback.

The compiled module ``_ck`` is preferred when importable; setting the
environment variable ``CAYLEYLAB_PURE=1`` before import forces the numpy
fallback ``_pk``. ``BACKEND`` records which one is active.
"""

import os

import numpy as np

if os.environ.get("CAYLEYLAB_PURE"):
    from . import _pk as _backend
else:
    try:
        from . import _ck as _backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _pk as _backend

BACKEND = _backend.__name__.rsplit(".", 1)[-1].lstrip("_")  # "ck" or "pk"


def conv_step(f, perms, weights, backend=None):
    """out[x] = sum_i weights[i] * f[perms[i, x]] (one transfer-operator step)."""
    mod = _named(backend)
    f = np.ascontiguousarray(f, dtype=np.float64)
    perms = np.ascontiguousarray(perms, dtype=np.intc)
    if perms.ndim == 1:
        perms = perms[None, :]
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    return mod.conv_step(f, perms, weights)


def sl2_word_entries(letters, gens, mul_table, add_table, backend=None):
    """Batched 2x2 word products over field codes; 255 is a skip sentinel."""
    mod = _named(backend)
    letters = np.ascontiguousarray(letters, dtype=np.uint8)
    gens = np.ascontiguousarray(gens, dtype=np.int64)
    mul_table = np.ascontiguousarray(mul_table, dtype=np.int64)
    add_table = np.ascontiguousarray(add_table, dtype=np.int64)
    return mod.sl2_word_entries(letters, gens, mul_table, add_table)


def _named(backend):
    if backend is None:
        return _backend
    if backend == "pk":
        from . import _pk

        return _pk
    if backend == "ck":
        from . import _ck  # raises ImportError when not compiled

        return _ck
    raise ValueError(f"unknown backend {backend!r}")


def available_backends():
    out = ["pk"]
    try:
        from . import _ck  # noqa: F401

        out.insert(0, "ck")
    except ImportError:
        pass
    return out
