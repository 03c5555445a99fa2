"""Kernel backend selection.

The compiled Cython kernels are used when importable; otherwise, or when
the environment variable ``MNBP_PURE_PYTHON`` is set to a non-empty value,
the numpy implementation is used. Both expose ``horizontal_pass``,
``vertical_pass`` and ``sus_sweep`` with identical semantics.
"""
import os

from . import _pykernels as python

try:
    from . import _ckernels as compiled
except ImportError:  # extension not built
    compiled = None

BACKENDS = {"python": python}
if compiled is not None:
    BACKENDS["compiled"] = compiled

default = python if os.environ.get("MNBP_PURE_PYTHON") or compiled is None else compiled


def get_backend(name=None):
    """Backend module by name (``"python"``/``"compiled"``), or the default."""
    if name is None:
        return default
    if not isinstance(name, str):
        return name
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
