"""Hot numerical kernels with a compiled backend and a numpy fallback.

The compiled extension is used when it imports; set ``MESHCOND_PURE=1``
to force the numpy implementation.
"""

import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("MESHCOND_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

csr_matvec = _impl.csr_matvec
cg = _impl.cg
jacobi_eigenvalues = _impl.jacobi_eigenvalues

__all__ = ["BACKEND", "csr_matvec", "cg", "jacobi_eigenvalues"]
