"""Select the compiled kernels when available, else the pure-Python ones.

Set ``TORIC_RG_BACKEND=python`` to force the fallback.
"""

import os

from . import _purepy

python_kernels = _purepy
compiled_kernels = None

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if compiled_kernels is not None and os.environ.get("TORIC_RG_BACKEND", "").lower() != "python":
    kernels = compiled_kernels
    NAME = "cython"
else:
    kernels = _purepy
    NAME = "python"
