"""Kernel backend selection: compiled extension if available, numpy otherwise."""

try:
    from . import _kernels as kernels
except ImportError:  # extension not built on this install
    from . import _kernels_py as kernels


def kernel_backend() -> str:
    """Name of the active gate-kernel backend ("compiled" or "python")."""
    return kernels.BACKEND_NAME
