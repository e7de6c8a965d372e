"""Hot-loop kernels, compiled when available.

The Cython extension ``_ckernels`` is imported if it was built; otherwise the
numpy versions in ``_pykernels`` are used. ``BACKEND`` names the active one.
"""
from . import _pykernels

try:
    from . import _ckernels as _active
    BACKEND = "cython"
except ImportError:  # extension not built
    _active = _pykernels
    BACKEND = "python"


def get(name=None):
    """Return a kernel module: ``"cython"``, ``"python"`` or the active one."""
    if name is None:
        return _active
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def rk4_propagate(H, psi0, dt):
    return _active.rk4_propagate(H, psi0, dt)


def half_step_unitaries(V, l1, l2, tau):
    return _active.half_step_unitaries(V, l1, l2, tau)


def apply_channel_unitaries(U, psi):
    return _active.apply_channel_unitaries(U, psi)
